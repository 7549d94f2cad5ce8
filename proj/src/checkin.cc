// Copyright 2026 The RSPAP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rspap/checkin.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "rspap/error.h"

namespace rspap {
namespace {

constexpr std::int64_t kSecondsPerDay = 86400;
constexpr std::size_t kMaxRecordedSkips = 100;

std::vector<std::string_view> Split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view StripCr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool IsBlank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

template <typename T>
bool ParseInt(std::string_view text, T* out) {
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), *out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string LineError(std::size_t line_number, const std::string& what) {
  std::ostringstream msg;
  msg << "line " << line_number << ": " << what;
  return msg.str();
}

// Cell key of a 3-decimal truncated coordinate pair.
std::uint64_t CellKey(std::int64_t lat_e7, std::int64_t lon_e7) {
  const std::int64_t lat_cell = lat_e7 / 10'000 + 1'000'000;
  const std::int64_t lon_cell = lon_e7 / 10'000 + 2'000'000;
  return static_cast<std::uint64_t>(lat_cell) * 4'000'000ULL + static_cast<std::uint64_t>(lon_cell);
}

int FourthDecimal(std::int64_t v_e7) {
  const std::int64_t a = v_e7 < 0 ? -v_e7 : v_e7;
  return static_cast<int>((a / 1'000) % 10);
}

auto PoiOrderKey(const PoiRecord& p) {
  return std::make_tuple(FourthDecimal(p.lat_e7) + FourthDecimal(p.lon_e7), p.category,
                         p.lat_e7, p.lon_e7);
}

}  // namespace

std::optional<std::int64_t> ParseCoordinate(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const std::size_t dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac =
      dot == std::string_view::npos ? std::string_view() : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) return std::nullopt;
  if (whole.size() > 3) return std::nullopt;
  std::int64_t value = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  std::int64_t fraction = 0;
  int digits = 0;
  for (char c : frac) {
    if (c < '0' || c > '9') return std::nullopt;
    if (digits < 7) {
      fraction = fraction * 10 + (c - '0');
      ++digits;
    }
  }
  for (; digits < 7; ++digits) fraction *= 10;
  const std::int64_t result = value * kCoordScale + fraction;
  return negative ? -result : result;
}

std::optional<std::int64_t> ParseIso8601Utc(std::string_view text) {
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  if (text.size() != 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  int y, mo, d, h, mi, s;
  if (!ParseInt(text.substr(0, 4), &y) || !ParseInt(text.substr(5, 2), &mo) ||
      !ParseInt(text.substr(8, 2), &d) || !ParseInt(text.substr(11, 2), &h) ||
      !ParseInt(text.substr(14, 2), &mi) || !ParseInt(text.substr(17, 2), &s)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year(y),
                                        std::chrono::month(static_cast<unsigned>(mo)),
                                        std::chrono::day(static_cast<unsigned>(d))};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59) return std::nullopt;
  const std::int64_t days = std::chrono::sys_days(ymd).time_since_epoch().count();
  return days * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

std::string FormatIso8601Utc(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / kSecondsPerDay;
  std::int64_t rem = epoch_seconds % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days;
  }
  const std::chrono::year_month_day ymd{std::chrono::sys_days(std::chrono::days(days))};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

std::vector<RawCheckin> ParseCheckins(std::istream& in, ParseStats* stats) {
  ParseStats local;
  std::vector<RawCheckin> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view view = StripCr(line);
    if (IsBlank(view)) continue;
    ++local.lines;
    const auto fields = Split(view, '\t');
    RawCheckin entry;
    bool ok = fields.size() == 5 && !fields[0].empty() && !fields[4].empty();
    if (ok) {
      const auto time = ParseIso8601Utc(fields[1]);
      const auto lat = ParseCoordinate(fields[2]);
      const auto lon = ParseCoordinate(fields[3]);
      ok = time && lat && lon && *lat >= -90 * kCoordScale && *lat <= 90 * kCoordScale &&
           *lon >= -180 * kCoordScale && *lon <= 180 * kCoordScale;
      if (ok) {
        entry.user_id = std::string(fields[0]);
        entry.epoch_seconds = *time;
        entry.lat_e7 = *lat;
        entry.lon_e7 = *lon;
        entry.location_id = std::string(fields[4]);
      }
    }
    if (ok) {
      out.push_back(std::move(entry));
    } else {
      ++local.skipped;
      if (local.skipped_line_numbers.size() < kMaxRecordedSkips) {
        local.skipped_line_numbers.push_back(line_number);
      }
    }
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure while parsing check-ins");
  if (local.skipped * 2 > local.lines) {
    std::ostringstream msg;
    msg << local.skipped << " of " << local.lines << " check-in lines are malformed";
    if (!local.skipped_line_numbers.empty()) {
      msg << " (first at line " << local.skipped_line_numbers.front() << ")";
    }
    throw Error(ErrorCode::kFormat, msg.str());
  }
  if (stats) *stats = std::move(local);
  return out;
}

std::vector<RawCheckin> ParseCheckinsFile(const std::string& path, ParseStats* stats) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open check-in file " + path);
  return ParseCheckins(in, stats);
}

std::vector<PoiRecord> ParsePois(std::istream& in) {
  std::vector<PoiRecord> out;
  std::string line;
  std::size_t line_number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view view = StripCr(line);
    if (IsBlank(view)) continue;
    const auto fields = Split(view, ',');
    PoiRecord poi;
    std::optional<std::int64_t> lat, lon;
    bool ok = fields.size() == 3;
    if (ok) {
      lat = ParseCoordinate(fields[0]);
      lon = ParseCoordinate(fields[1]);
      ok = lat && lon && ParseInt(fields[2], &poi.category);
    }
    if (!ok && first && fields.size() == 3) {
      first = false;  // header
      continue;
    }
    first = false;
    if (!ok) throw Error(ErrorCode::kFormat, LineError(line_number, "malformed POI record"));
    if (*lat < -90 * kCoordScale || *lat > 90 * kCoordScale || *lon < -180 * kCoordScale ||
        *lon > 180 * kCoordScale) {
      throw Error(ErrorCode::kFormat, LineError(line_number, "POI coordinate out of range"));
    }
    if (poi.category < 1 || poi.category > kCategories) {
      throw Error(ErrorCode::kFormat, LineError(line_number, "POI category outside [1,15]"));
    }
    poi.lat_e7 = *lat;
    poi.lon_e7 = *lon;
    out.push_back(poi);
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure while parsing POIs");
  return out;
}

std::vector<PoiRecord> ParsePoisFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open POI file " + path);
  return ParsePois(in);
}

PoiIndex::PoiIndex(std::span<const PoiRecord> pois) {
  for (const PoiRecord& poi : pois) {
    const std::uint64_t key = CellKey(poi.lat_e7, poi.lon_e7);
    auto [it, inserted] = winners_.try_emplace(key, poi);
    if (!inserted && PoiOrderKey(poi) < PoiOrderKey(it->second)) it->second = poi;
  }
}

std::optional<int> PoiIndex::Map(std::int64_t lat_e7, std::int64_t lon_e7) const {
  const auto it = winners_.find(CellKey(lat_e7, lon_e7));
  if (it == winners_.end()) return std::nullopt;
  return it->second.category;
}

int SlotOfHour(int hour) {
  if (hour >= 6 && hour < 12) return 1;
  if (hour >= 12 && hour < 17) return 2;
  if (hour >= 17 && hour < 20) return 3;
  return 4;
}

int SlotOf(std::int64_t epoch_seconds) {
  std::int64_t rem = epoch_seconds % kSecondsPerDay;
  if (rem < 0) rem += kSecondsPerDay;
  return SlotOfHour(static_cast<int>(rem / 3600));
}

std::vector<CheckinEntry> MapCheckins(std::span<const RawCheckin> raw, const PoiIndex& pois,
                                      MapStats* stats) {
  std::vector<CheckinEntry> out;
  out.reserve(raw.size());
  MapStats local;
  for (const RawCheckin& r : raw) {
    const auto category = pois.Map(r.lat_e7, r.lon_e7);
    if (!category) {
      ++local.dropped;
      continue;
    }
    out.push_back({r.user_id, r.epoch_seconds, *category, SlotOf(r.epoch_seconds)});
  }
  local.mapped = out.size();
  if (stats) *stats = local;
  return out;
}

void WriteMappedDataset(std::ostream& out, std::span<const CheckinEntry> entries) {
  out << "user_id,epoch_seconds,category,slot\n";
  for (const CheckinEntry& e : entries) {
    out << e.user_id << ',' << e.epoch_seconds << ',' << e.category << ',' << e.slot << '\n';
  }
}

std::vector<CheckinEntry> ReadMappedDataset(std::istream& in) {
  std::vector<CheckinEntry> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view view = StripCr(line);
    if (IsBlank(view)) continue;
    if (line_number == 1 && view.rfind("user_id,", 0) == 0) continue;
    const auto fields = Split(view, ',');
    CheckinEntry e;
    if (fields.size() != 4 || fields[0].empty() || !ParseInt(fields[1], &e.epoch_seconds) ||
        !ParseInt(fields[2], &e.category) || !ParseInt(fields[3], &e.slot)) {
      throw Error(ErrorCode::kFormat, LineError(line_number, "malformed mapped-dataset row"));
    }
    if (e.category < 1 || e.category > kCategories || e.slot < 1 || e.slot > kSlots) {
      throw Error(ErrorCode::kFormat, LineError(line_number, "category or slot out of range"));
    }
    e.user_id = std::string(fields[0]);
    out.push_back(std::move(e));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure while parsing mapped dataset");
  return out;
}

std::vector<CheckinEntry> ReadMappedDatasetFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open mapped dataset " + path);
  return ReadMappedDataset(in);
}

std::array<double, kCategories> JointPmf::CategoryMarginal() const {
  std::array<double, kCategories> px{};
  for (int c = 0; c < kCells; ++c) px[c / kSlots] += probs[c];
  return px;
}

std::array<double, kSlots> JointPmf::SlotMarginal() const {
  std::array<double, kSlots> py{};
  for (int c = 0; c < kCells; ++c) py[c % kSlots] += probs[c];
  return py;
}

JointPmf JointPmfFromCounts(std::span<const std::int64_t, kCells> counts) {
  JointPmf pmf;
  for (std::int64_t c : counts) pmf.support_count += c;
  if (pmf.support_count <= 0) throw Error(ErrorCode::kDegenerate, "pmf of an empty dataset");
  const double total = static_cast<double>(pmf.support_count);
  for (int c = 0; c < kCells; ++c) pmf.probs[c] = static_cast<double>(counts[c]) / total;
  return pmf;
}

JointPmf EstimateJointPmf(std::span<const CheckinEntry> entries,
                          std::span<const std::int64_t> indices) {
  std::array<std::int64_t, kCells> counts{};
  if (indices.empty()) {
    for (const CheckinEntry& e : entries) ++counts[e.cell()];
  } else {
    for (std::int64_t i : indices) {
      if (i < 0 || static_cast<std::size_t>(i) >= entries.size()) {
        throw Error(ErrorCode::kParameter, "entry index out of range");
      }
      ++counts[entries[i].cell()];
    }
  }
  return JointPmfFromCounts(counts);
}

namespace {

// Category shares and per-category slot profiles of the reference table.
constexpr std::array<double, kCategories> kCategoryShare = {
    0.06, 0.03, 0.01, 0.10, 0.24, 0.03, 0.07, 0.02, 0.03, 0.05, 0.17, 0.04, 0.07, 0.07, 0.01};
constexpr std::array<std::array<double, kSlots>, kCategories> kSlotProfile = {{
    {0.15, 0.15, 0.20, 0.50},
    {0.45, 0.45, 0.07, 0.03},
    {0.40, 0.45, 0.10, 0.05},
    {0.50, 0.35, 0.10, 0.05},
    {0.22, 0.28, 0.33, 0.17},
    {0.40, 0.35, 0.15, 0.10},
    {0.30, 0.40, 0.20, 0.10},
    {0.50, 0.45, 0.04, 0.01},
    {0.50, 0.20, 0.20, 0.10},
    {0.35, 0.35, 0.20, 0.10},
    {0.25, 0.40, 0.25, 0.10},
    {0.05, 0.20, 0.35, 0.40},
    {0.15, 0.30, 0.30, 0.25},
    {0.35, 0.25, 0.20, 0.20},
    {0.30, 0.40, 0.20, 0.10},
}};

// First hour and length in hours of each slot; slot 4 wraps past midnight.
constexpr std::array<int, kSlots> kSlotStartHour = {6, 12, 17, 20};
constexpr std::array<int, kSlots> kSlotHours = {6, 5, 3, 10};

// 2009-02-01 .. 2010-10-23, the span of the public Gowalla release.
constexpr std::int64_t kFirstDay = 14276;
constexpr std::int64_t kDaySpan = 629;

// Midwest-like bounding box, in 1e-7 degrees.
constexpr std::int64_t kLatLo = 37 * kCoordScale, kLatSpan = 12 * kCoordScale;
constexpr std::int64_t kLonLo = -104 * kCoordScale, kLonSpan = 24 * kCoordScale;

int SampleIndex(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.Uniform01() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return static_cast<int>(i);
    u -= weights[i];
  }
  return static_cast<int>(weights.size()) - 1;
}

std::int64_t SampleTime(int slot, Rng& rng) {
  const std::int64_t day = kFirstDay + static_cast<std::int64_t>(rng.UniformIndex(kDaySpan));
  const int hour = (kSlotStartHour[slot - 1] +
                    static_cast<int>(rng.UniformIndex(kSlotHours[slot - 1]))) % 24;
  const auto second_of_hour = static_cast<std::int64_t>(rng.UniformIndex(3600));
  return day * kSecondsPerDay + hour * 3600 + second_of_hour;
}

std::string FormatCoordinate(std::int64_t v_e7) {
  const std::int64_t a = v_e7 < 0 ? -v_e7 : v_e7;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%lld.%07lld", v_e7 < 0 ? "-" : "",
                static_cast<long long>(a / kCoordScale), static_cast<long long>(a % kCoordScale));
  return buf;
}

// A point in the same truncated cell as (lat, lon).
std::int64_t JitterInCell(std::int64_t v_e7, Rng& rng) {
  const std::int64_t base = v_e7 / 10'000 * 10'000;
  const auto offset = static_cast<std::int64_t>(rng.UniformIndex(10'000));
  return v_e7 < 0 ? base - offset : base + offset;
}

}  // namespace

const std::array<double, kCells>& ReferenceJointTable() {
  static const std::array<double, kCells> table = [] {
    std::array<double, kCells> t{};
    for (int x = 1; x <= kCategories; ++x) {
      for (int y = 1; y <= kSlots; ++y) {
        t[CellOf(x, y)] = kCategoryShare[x - 1] * kSlotProfile[x - 1][y - 1];
      }
    }
    return t;
  }();
  return table;
}

SyntheticCorpus GenerateSyntheticCorpus(std::size_t checkins, Rng& rng) {
  SyntheticCorpus corpus;
  const std::size_t poi_count = std::max<std::size_t>(kCategories, checkins / 4);
  std::vector<std::vector<std::size_t>> by_category(kCategories);
  corpus.pois.reserve(poi_count);
  for (std::size_t i = 0; i < poi_count; ++i) {
    PoiRecord poi;
    poi.category = i < kCategories ? static_cast<int>(i) + 1 : SampleIndex(kCategoryShare, rng) + 1;
    poi.lat_e7 = kLatLo + static_cast<std::int64_t>(rng.UniformIndex(kLatSpan));
    poi.lon_e7 = kLonLo + static_cast<std::int64_t>(rng.UniformIndex(kLonSpan));
    by_category[poi.category - 1].push_back(i);
    corpus.pois.push_back(poi);
  }
  corpus.checkin_lines.reserve(checkins);
  for (std::size_t i = 0; i < checkins; ++i) {
    const auto user = rng.UniformIndex(2000);
    std::int64_t lat, lon;
    int slot;
    std::uint64_t location;
    if (rng.Uniform01() < 0.05) {
      lat = kLatLo + static_cast<std::int64_t>(rng.UniformIndex(kLatSpan));
      lon = kLonLo + static_cast<std::int64_t>(rng.UniformIndex(kLonSpan));
      slot = static_cast<int>(rng.UniformIndex(kSlots)) + 1;
      location = 1'000'000 + rng.UniformIndex(1'000'000);
    } else {
      const int category = SampleIndex(kCategoryShare, rng) + 1;
      const auto& candidates = by_category[category - 1];
      const std::size_t poi = candidates[rng.UniformIndex(candidates.size())];
      lat = JitterInCell(corpus.pois[poi].lat_e7, rng);
      lon = JitterInCell(corpus.pois[poi].lon_e7, rng);
      slot = SampleIndex(kSlotProfile[category - 1], rng) + 1;
      location = poi;
    }
    std::ostringstream line;
    line << user << '\t' << FormatIso8601Utc(SampleTime(slot, rng)) << '\t'
         << FormatCoordinate(lat) << '\t' << FormatCoordinate(lon) << '\t' << location;
    corpus.checkin_lines.push_back(line.str());
  }
  return corpus;
}

std::vector<CheckinEntry> GenerateSyntheticEntries(std::size_t count, Rng& rng) {
  const auto& table = ReferenceJointTable();
  std::vector<CheckinEntry> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int cell = SampleIndex(table, rng);
    CheckinEntry e;
    e.user_id = std::to_string(rng.UniformIndex(2000));
    e.category = cell / kSlots + 1;
    e.slot = cell % kSlots + 1;
    e.epoch_seconds = SampleTime(e.slot, rng);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace rspap
