#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirfuzz/callgraph.hpp"

namespace dirfuzz {

// A set of program-counter points, stored as sorted disjoint half-open
// intervals. Coverage always arrives as whole function ranges, so interval
// form keeps the fuzz loop's set algebra cheap.
class PcSet {
public:
  using Interval = std::pair<uint64_t, uint64_t>;  // [start, end)

  PcSet() = default;

  void add(uint64_t pc) { add_range(pc, pc + 1); }
  void add_range(uint64_t start, uint64_t end);
  void merge(const PcSet& other);

  bool contains(uint64_t pc) const;
  bool intersects(const PcSet& other) const;
  bool subset_of(const PcSet& other) const;
  // Elements of *this not in other.
  PcSet difference(const PcSet& other) const;
  PcSet intersection(const PcSet& other) const;

  bool empty() const { return intervals_.empty(); }
  // Number of pc points.
  uint64_t size() const;
  void clear() { intervals_.clear(); }

  const std::vector<Interval>& intervals() const { return intervals_; }
  static PcSet from_intervals(std::vector<Interval> intervals);

  // Expanded point list; test/debug use.
  std::vector<uint64_t> pcs() const;

  bool operator==(const PcSet&) const = default;

private:
  std::vector<Interval> intervals_;
};

// Maps a pc point to the function owning it. Built from the declared pc
// ranges; lookup is binary search.
class PcMap {
public:
  struct Entry {
    uint64_t start;
    uint64_t end;
    FunctionId function;
  };

  static PcMap build(const CallGraph& g);

  std::optional<FunctionId> lookup(uint64_t pc) const;
  const std::vector<Entry>& entries() const { return entries_; }
  // Declared functions that have no pc range, name order.
  const std::vector<FunctionId>& unmapped() const { return unmapped_; }

  std::optional<PcSet::Interval> range_of(const FunctionId& name) const;

private:
  std::vector<Entry> entries_;  // sorted by start, disjoint
  std::vector<FunctionId> unmapped_;
};

// Pc points belonging to the close-area functions, precomputed for cheap
// per-execution checks.
PcSet close_area_pcs(const PcMap& map, const std::vector<FunctionId>& close);

inline bool covers_close_area(const PcSet& trace, const PcSet& close_set) {
  return trace.intersects(close_set);
}

}  // namespace dirfuzz
