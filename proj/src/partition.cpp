#include "marlab/partition.hpp"

#include <limits>
#include <numeric>
#include <utility>

namespace marlab {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

void check_same_space(const Partition& p, const Partition& q) {
  if (p.space_size() != q.space_size()) {
    throw UsageError("partitions over different spaces (" + std::to_string(p.space_size()) + " vs " +
                     std::to_string(q.space_size()) + " outcomes)");
  }
}

}  // namespace

Partition Partition::from_block_ids(std::span<const std::size_t> ids) {
  if (ids.empty()) throw UsageError("partition of an empty space");
  Partition p;
  p.block_of_.resize(ids.size());
  std::map<std::size_t, std::uint32_t> relabel;
  for (std::size_t w = 0; w < ids.size(); ++w) {
    p.block_of_[w] = relabel.try_emplace(ids[w], static_cast<std::uint32_t>(relabel.size())).first->second;
  }
  p.block_count_ = relabel.size();
  return p;
}

Partition Partition::from_blocks(std::size_t space_size,
                                 const std::vector<std::vector<std::size_t>>& blocks) {
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> ids(space_size, kUnset);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw UsageError("partition block " + std::to_string(b) + " is empty");
    for (std::size_t w : blocks[b]) {
      if (w >= space_size) throw UsageError("outcome " + std::to_string(w) + " outside the space");
      if (ids[w] != kUnset) throw UsageError("outcome " + std::to_string(w) + " in two blocks");
      ids[w] = b;
    }
  }
  for (std::size_t w = 0; w < space_size; ++w) {
    if (ids[w] == kUnset) throw UsageError("outcome " + std::to_string(w) + " in no block");
  }
  return from_block_ids(ids);
}

Partition Partition::trivial(std::size_t space_size) {
  return from_block_ids(std::vector<std::size_t>(space_size, 0));
}

Partition Partition::full(std::size_t space_size) {
  std::vector<std::size_t> ids(space_size);
  std::iota(ids.begin(), ids.end(), 0);
  return from_block_ids(ids);
}

std::vector<std::vector<std::size_t>> Partition::blocks() const {
  std::vector<std::vector<std::size_t>> out(block_count_);
  for (std::size_t w = 0; w < block_of_.size(); ++w) out[block_of_[w]].push_back(w);
  return out;
}

bool Partition::refines(const Partition& coarser) const {
  check_same_space(*this, coarser);
  std::vector<std::int64_t> image(block_count_, -1);
  for (std::size_t w = 0; w < block_of_.size(); ++w) {
    auto& target = image[block_of_[w]];
    const auto c = static_cast<std::int64_t>(coarser.block_of(w));
    if (target < 0) {
      target = c;
    } else if (target != c) {
      return false;
    }
  }
  return true;
}

Partition join(const Partition& p, const Partition& q) {
  check_same_space(p, q);
  return generated_partition(p.space_size(), [&](std::size_t w) {
    return std::pair{p.block_of(w), q.block_of(w)};
  });
}

Partition meet(const Partition& p, const Partition& q) {
  check_same_space(p, q);
  DisjointSets sets(p.space_size());
  for (const Partition* part : {&p, &q}) {
    std::vector<std::int64_t> first(part->block_count(), -1);
    for (std::size_t w = 0; w < part->space_size(); ++w) {
      auto& rep = first[part->block_of(w)];
      if (rep < 0) {
        rep = static_cast<std::int64_t>(w);
      } else {
        sets.unite(static_cast<std::size_t>(rep), w);
      }
    }
  }
  std::vector<std::size_t> ids(p.space_size());
  for (std::size_t w = 0; w < ids.size(); ++w) ids[w] = sets.find(w);
  return Partition::from_block_ids(ids);
}

}  // namespace marlab
