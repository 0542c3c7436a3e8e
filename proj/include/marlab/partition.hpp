#pragma once

// Sigma algebras on a finite outcome space, held as their atoms.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "marlab/error.hpp"

namespace marlab {

/// A partition of {0..space_size-1}. Blocks are numbered by their smallest
/// member, so two partitions are the same sigma algebra iff they compare equal.
class Partition {
 public:
  /// Relabels arbitrary block ids canonically. Throws UsageError when empty.
  static Partition from_block_ids(std::span<const std::size_t> ids);
  static Partition from_blocks(std::size_t space_size,
                               const std::vector<std::vector<std::size_t>>& blocks);
  static Partition trivial(std::size_t space_size);
  static Partition full(std::size_t space_size);

  std::size_t space_size() const { return block_of_.size(); }
  std::size_t block_count() const { return block_count_; }
  std::size_t block_of(std::size_t outcome) const { return block_of_[outcome]; }
  std::span<const std::uint32_t> block_ids() const { return block_of_; }

  /// Members of every block, each sorted ascending.
  std::vector<std::vector<std::size_t>> blocks() const;

  /// Every block of *this lies inside a block of coarser.
  bool refines(const Partition& coarser) const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  Partition() = default;

  std::vector<std::uint32_t> block_of_;
  std::size_t block_count_ = 0;
};

/// Sigma algebra generated by a labelling: outcomes share a block iff labels are equal.
template <typename LabelFn>
Partition generated_partition(std::size_t space_size, LabelFn&& label) {
  if (space_size == 0) throw UsageError("generated_partition on an empty space");
  using Label = std::decay_t<decltype(label(std::size_t{0}))>;
  std::map<Label, std::size_t> ids;
  std::vector<std::size_t> block(space_size);
  for (std::size_t w = 0; w < space_size; ++w) {
    block[w] = ids.try_emplace(label(w), ids.size()).first->second;
  }
  return Partition::from_block_ids(block);
}

/// Common refinement.
Partition join(const Partition& p, const Partition& q);

/// Finest common coarsening: connected components of the shared-block graph.
Partition meet(const Partition& p, const Partition& q);

/// values is constant on every block of p.
template <typename T>
bool is_measurable(std::span<const T> values, const Partition& p) {
  if (values.size() != p.space_size()) throw UsageError("function and partition sizes differ");
  std::vector<const T*> seen(p.block_count(), nullptr);
  for (std::size_t w = 0; w < values.size(); ++w) {
    const T*& rep = seen[p.block_of(w)];
    if (rep == nullptr) {
      rep = &values[w];
    } else if (!(*rep == values[w])) {
      return false;
    }
  }
  return true;
}

template <typename T>
bool is_measurable(const std::vector<T>& values, const Partition& p) {
  return is_measurable(std::span<const T>(values), p);
}

/// Measurability ignoring undefined entries: defined values are constant per block.
template <typename T>
bool is_measurable_where_defined(std::span<const std::optional<T>> values, const Partition& p) {
  if (values.size() != p.space_size()) throw UsageError("function and partition sizes differ");
  std::vector<const T*> seen(p.block_count(), nullptr);
  for (std::size_t w = 0; w < values.size(); ++w) {
    if (!values[w]) continue;
    const T*& rep = seen[p.block_of(w)];
    if (rep == nullptr) {
      rep = &*values[w];
    } else if (!(*rep == *values[w])) {
      return false;
    }
  }
  return true;
}

}  // namespace marlab
