#include "dirfuzz/pcmap.hpp"

#include <algorithm>
#include <set>

namespace dirfuzz {

void PcSet::add_range(uint64_t start, uint64_t end) {
  if (start >= end) return;

  // Find all intervals overlapping or touching [start, end) and coalesce.
  auto lo = std::lower_bound(
      intervals_.begin(), intervals_.end(), start,
      [](const Interval& iv, uint64_t s) { return iv.second < s; });
  auto hi = lo;
  while (hi != intervals_.end() && hi->first <= end) {
    start = std::min(start, hi->first);
    end = std::max(end, hi->second);
    ++hi;
  }
  if (lo == hi) {
    intervals_.insert(lo, {start, end});
  } else {
    lo->first = start;
    lo->second = end;
    intervals_.erase(lo + 1, hi);
  }
}

void PcSet::merge(const PcSet& other) {
  if (other.intervals_.empty()) return;
  if (intervals_.empty()) {
    intervals_ = other.intervals_;
    return;
  }
  // Chains of add_range keep this O(n+m) amortized in practice; coverage
  // sets here stay small (hundreds of intervals).
  for (const auto& iv : other.intervals_) add_range(iv.first, iv.second);
}

bool PcSet::contains(uint64_t pc) const {
  auto it = std::upper_bound(
      intervals_.begin(), intervals_.end(), pc,
      [](uint64_t p, const Interval& iv) { return p < iv.first; });
  if (it == intervals_.begin()) return false;
  --it;
  return pc >= it->first && pc < it->second;
}

bool PcSet::intersects(const PcSet& other) const {
  size_t i = 0, j = 0;
  while (i < intervals_.size() && j < other.intervals_.size()) {
    const auto& a = intervals_[i];
    const auto& b = other.intervals_[j];
    if (a.second <= b.first)
      ++i;
    else if (b.second <= a.first)
      ++j;
    else
      return true;
  }
  return false;
}

bool PcSet::subset_of(const PcSet& other) const {
  size_t j = 0;
  for (const auto& a : intervals_) {
    while (j < other.intervals_.size() && other.intervals_[j].second <= a.first)
      ++j;
    if (j == other.intervals_.size()) return false;
    const auto& b = other.intervals_[j];
    if (!(b.first <= a.first && a.second <= b.second)) return false;
  }
  return true;
}

PcSet PcSet::difference(const PcSet& other) const {
  PcSet out;
  size_t j = 0;
  for (const auto& a : intervals_) {
    uint64_t cur = a.first;
    while (cur < a.second) {
      while (j < other.intervals_.size() && other.intervals_[j].second <= cur)
        ++j;
      if (j == other.intervals_.size() || other.intervals_[j].first >= a.second) {
        out.intervals_.emplace_back(cur, a.second);
        break;
      }
      const auto& b = other.intervals_[j];
      if (b.first > cur) out.intervals_.emplace_back(cur, b.first);
      cur = b.second;
    }
  }
  return out;
}

PcSet PcSet::intersection(const PcSet& other) const {
  PcSet out;
  size_t i = 0, j = 0;
  while (i < intervals_.size() && j < other.intervals_.size()) {
    const auto& a = intervals_[i];
    const auto& b = other.intervals_[j];
    uint64_t lo = std::max(a.first, b.first);
    uint64_t hi = std::min(a.second, b.second);
    if (lo < hi) out.intervals_.emplace_back(lo, hi);
    if (a.second < b.second)
      ++i;
    else
      ++j;
  }
  return out;
}

uint64_t PcSet::size() const {
  uint64_t n = 0;
  for (const auto& iv : intervals_) n += iv.second - iv.first;
  return n;
}

PcSet PcSet::from_intervals(std::vector<Interval> intervals) {
  PcSet out;
  std::sort(intervals.begin(), intervals.end());
  for (const auto& iv : intervals) out.add_range(iv.first, iv.second);
  return out;
}

std::vector<uint64_t> PcSet::pcs() const {
  std::vector<uint64_t> out;
  for (const auto& iv : intervals_)
    for (uint64_t p = iv.first; p < iv.second; ++p) out.push_back(p);
  return out;
}

PcMap PcMap::build(const CallGraph& g) {
  PcMap m;
  for (NodeId id = 0; id < g.node_count(); ++id) {
    const auto& inf = g.info(id);
    if (inf.pc_range)
      m.entries_.push_back({inf.pc_range->start, inf.pc_range->end, inf.id});
    else
      m.unmapped_.push_back(inf.id);
  }
  std::sort(m.entries_.begin(), m.entries_.end(),
            [](const Entry& a, const Entry& b) { return a.start < b.start; });
  for (size_t i = 1; i < m.entries_.size(); ++i) {
    // Unreachable after callgraph validation, but this map is also built
    // from hand-assembled graphs in tests.
    if (m.entries_[i].start < m.entries_[i - 1].end)
      throw OverlapError("pc ranges of '" + m.entries_[i - 1].function +
                         "' and '" + m.entries_[i].function + "' overlap");
  }
  return m;
}

std::optional<FunctionId> PcMap::lookup(uint64_t pc) const {
  auto it = std::upper_bound(
      entries_.begin(), entries_.end(), pc,
      [](uint64_t p, const Entry& e) { return p < e.start; });
  if (it == entries_.begin()) return std::nullopt;
  --it;
  if (pc >= it->start && pc < it->end) return it->function;
  return std::nullopt;
}

std::optional<PcSet::Interval> PcMap::range_of(const FunctionId& name) const {
  for (const auto& e : entries_)
    if (e.function == name) return PcSet::Interval{e.start, e.end};
  return std::nullopt;
}

PcSet close_area_pcs(const PcMap& map, const std::vector<FunctionId>& close) {
  PcSet out;
  std::set<FunctionId> wanted(close.begin(), close.end());
  for (const auto& e : map.entries())
    if (wanted.count(e.function)) out.add_range(e.start, e.end);
  return out;
}

}  // namespace dirfuzz
