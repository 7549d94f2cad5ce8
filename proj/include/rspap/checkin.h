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

// Check-in ingestion: Gowalla-format parsing, POI category mapping, time
// slots and the joint (location type, time slot) pmf.

#ifndef RSPAP_CHECKIN_H_
#define RSPAP_CHECKIN_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rspap/random.h"

namespace rspap {

inline constexpr int kCategories = 15;
inline constexpr int kSlots = 4;
inline constexpr int kCells = kCategories * kSlots;

// Coordinates are kept as integers in units of 1e-7 degrees so that decimal
// truncation is exact.
inline constexpr std::int64_t kCoordScale = 10'000'000;

// Flat index of (category in [1,15], slot in [1,4]).
constexpr int CellOf(int category, int slot) { return (category - 1) * kSlots + (slot - 1); }

struct RawCheckin {
  std::string user_id;
  std::int64_t epoch_seconds = 0;
  std::int64_t lat_e7 = 0;
  std::int64_t lon_e7 = 0;
  std::string location_id;
};

struct ParseStats {
  std::size_t lines = 0;    // non-blank lines seen
  std::size_t skipped = 0;  // malformed or out-of-range lines
  std::vector<std::size_t> skipped_line_numbers;  // 1-based, first 100 only
};

// Parses `user<TAB>time<TAB>lat<TAB>lon<TAB>location-id` lines. Malformed
// lines are counted and skipped; throws kFormat when more than half of the
// non-blank lines are malformed.
std::vector<RawCheckin> ParseCheckins(std::istream& in, ParseStats* stats);
// Throws kIo when the file cannot be opened.
std::vector<RawCheckin> ParseCheckinsFile(const std::string& path, ParseStats* stats);

// Parses "2010-10-19T23:55:27Z" (the trailing Z is optional) into seconds
// since the Unix epoch.
std::optional<std::int64_t> ParseIso8601Utc(std::string_view text);
std::string FormatIso8601Utc(std::int64_t epoch_seconds);

// Parses a decimal degree string into 1e-7 degree units, truncating extra
// digits toward zero.
std::optional<std::int64_t> ParseCoordinate(std::string_view text);

struct PoiRecord {
  std::int64_t lat_e7 = 0;
  std::int64_t lon_e7 = 0;
  int category = 0;
};

// Parses `lat,lon,category_id` lines; an optional non-numeric header line is
// ignored. Throws kFormat naming the first bad line.
std::vector<PoiRecord> ParsePois(std::istream& in);
std::vector<PoiRecord> ParsePoisFile(const std::string& path);

// Maps a coordinate to a POI category. Candidates are the POIs in the same
// 3-decimal truncated cell; the winner has the smallest sum of the 4th
// decimal digits of |lat| and |lon|, ties going to the lowest
// (category, lat, lon). The result does not depend on insertion order.
class PoiIndex {
 public:
  explicit PoiIndex(std::span<const PoiRecord> pois);

  std::optional<int> Map(std::int64_t lat_e7, std::int64_t lon_e7) const;
  std::size_t cell_count() const { return winners_.size(); }

 private:
  std::unordered_map<std::uint64_t, PoiRecord> winners_;
};

// Time slot of an hour of day: 6-11 -> 1, 12-16 -> 2, 17-19 -> 3, else 4.
int SlotOfHour(int hour);
int SlotOf(std::int64_t epoch_seconds);

struct CheckinEntry {
  std::string user_id;
  std::int64_t epoch_seconds = 0;
  int category = 1;
  int slot = 1;

  int cell() const { return CellOf(category, slot); }
};

struct MapStats {
  std::size_t mapped = 0;
  std::size_t dropped = 0;
};

std::vector<CheckinEntry> MapCheckins(std::span<const RawCheckin> raw, const PoiIndex& pois,
                                      MapStats* stats);

// Mapped dataset CSV: `user_id,epoch_seconds,category,slot`, with header.
void WriteMappedDataset(std::ostream& out, std::span<const CheckinEntry> entries);
std::vector<CheckinEntry> ReadMappedDataset(std::istream& in);
std::vector<CheckinEntry> ReadMappedDatasetFile(const std::string& path);

// Joint pmf over (category, slot), row-major by category.
struct JointPmf {
  std::array<double, kCells> probs{};
  std::int64_t support_count = 0;

  double at(int category, int slot) const { return probs[CellOf(category, slot)]; }
  std::array<double, kCategories> CategoryMarginal() const;
  std::array<double, kSlots> SlotMarginal() const;
};

// Maximum-likelihood pmf of the given entries (all when indices is empty).
// Throws kDegenerate on an empty selection and kParameter on a bad index.
JointPmf EstimateJointPmf(std::span<const CheckinEntry> entries,
                          std::span<const std::int64_t> indices = {});
JointPmf JointPmfFromCounts(std::span<const std::int64_t, kCells> counts);

// Synthetic check-in data following a fixed 15x4 reference distribution
// shaped like a regional Gowalla extract.
const std::array<double, kCells>& ReferenceJointTable();

struct SyntheticCorpus {
  std::vector<std::string> checkin_lines;  // Gowalla format, no newline
  std::vector<PoiRecord> pois;
};

// About 5% of the generated check-ins fall in cells without a POI.
SyntheticCorpus GenerateSyntheticCorpus(std::size_t checkins, Rng& rng);
// Already-mapped entries drawn straight from the reference table.
std::vector<CheckinEntry> GenerateSyntheticEntries(std::size_t count, Rng& rng);

}  // namespace rspap

#endif  // RSPAP_CHECKIN_H_
