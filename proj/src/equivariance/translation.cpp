#include "equivar/translation.hpp"

#include <algorithm>
#include <string>

#include "equivar/errors.hpp"

namespace equivar {

namespace {

std::uint64_t block_size(const VariableSystem& system, std::span<const std::size_t> block) {
  std::uint64_t n = 1;
  for (std::size_t j : block) n *= system.cardinality(j);
  return n;
}

}  // namespace

Translation::Translation(VariableSystem source, VariableSystem target, std::vector<std::size_t> omega,
                         std::vector<std::vector<std::size_t>> value_maps)
    : source_(std::move(source)),
      target_(std::move(target)),
      omega_(std::move(omega)),
      value_maps_(std::move(value_maps)) {
  if (omega_.size() != source_.size()) {
    throw InvalidArgument("translation: omega has " + std::to_string(omega_.size()) + " entries, source has " +
                          std::to_string(source_.size()) + " variables");
  }
  if (value_maps_.size() != target_.size()) {
    throw InvalidArgument("translation: expected one value map per target variable");
  }
  blocks_.assign(target_.size(), {});
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    if (omega_[i] >= target_.size()) {
      throw InvalidArgument("translation: omega(" + source_[i].name + ") is out of range");
    }
    blocks_[omega_[i]].push_back(i);
  }
  for (std::size_t h = 0; h < target_.size(); ++h) {
    if (blocks_[h].empty()) {
      throw InvalidArgument("translation: target variable '" + target_[h].name + "' has no source variables");
    }
    // Guard against absurd blocks; the map is stored explicitly.
    const std::uint64_t expected = block_size(source_, blocks_[h]);
    if (value_maps_[h].size() != expected) {
      throw InvalidArgument("translation: value map of '" + target_[h].name + "' has " +
                            std::to_string(value_maps_[h].size()) + " entries, expected " +
                            std::to_string(expected));
    }
    for (std::size_t v : value_maps_[h]) {
      if (v >= target_.cardinality(h)) {
        throw InvalidArgument("translation: value map of '" + target_[h].name + "' leaves the domain");
      }
    }
  }
}

Translation Translation::identity(const VariableSystem& system) {
  std::vector<std::size_t> omega(system.size());
  std::vector<std::vector<std::size_t>> maps(system.size());
  for (std::size_t i = 0; i < system.size(); ++i) {
    omega[i] = i;
    maps[i].resize(system.cardinality(i));
    for (std::size_t v = 0; v < maps[i].size(); ++v) maps[i][v] = v;
  }
  return Translation(system, system, std::move(omega), std::move(maps));
}

std::size_t Translation::block_value(std::size_t h, std::span<const std::size_t> source_assignment) const {
  std::size_t index = 0;
  for (std::size_t j : blocks_[h]) index = index * source_.cardinality(j) + source_assignment[j];
  return value_maps_[h][index];
}

Assignment Translation::apply(std::span<const std::size_t> source_assignment) const {
  if (source_assignment.size() != source_.size()) {
    throw DimensionMismatch("translation: assignment has " + std::to_string(source_assignment.size()) +
                            " values, source has " + std::to_string(source_.size()) + " variables");
  }
  Assignment out(target_.size());
  for (std::size_t h = 0; h < target_.size(); ++h) out[h] = block_value(h, source_assignment);
  return out;
}

std::uint64_t Translation::apply_state(std::uint64_t source_state) const {
  Assignment a = source_.decode(source_state);
  std::uint64_t out = 0;
  for (std::size_t h = 0; h < target_.size(); ++h) out += block_value(h, a) * target_.stride(h);
  return out;
}

Translation Translation::restrict(std::span<const std::size_t> source_subset) const {
  std::vector<bool> in(source_.size(), false);
  for (std::size_t j : source_subset) {
    if (j >= source_.size()) throw IndexOutOfRange("translation: restrict index out of range");
    in[j] = true;
  }
  std::vector<std::size_t> targets;
  for (std::size_t j : source_subset) targets.push_back(omega_[j]);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  for (std::size_t h : targets) {
    for (std::size_t j : blocks_[h]) {
      if (!in[j]) {
        throw InvalidArgument("translation: subset splits the block of '" + target_[h].name + "'");
      }
    }
  }
  std::vector<std::size_t> target_pos(target_.size(), 0);
  for (std::size_t k = 0; k < targets.size(); ++k) target_pos[targets[k]] = k;
  std::vector<std::size_t> omega(source_subset.size());
  for (std::size_t k = 0; k < source_subset.size(); ++k) omega[k] = target_pos[omega_[source_subset[k]]];

  // Blocks in the subsystem are ordered by position in `source_subset`, which
  // may differ from ascending source order; re-index the value maps.
  std::vector<std::vector<std::size_t>> maps(targets.size());
  std::vector<std::size_t> position(source_.size(), 0);
  for (std::size_t k = 0; k < source_subset.size(); ++k) position[source_subset[k]] = k;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const std::size_t h = targets[k];
    std::vector<std::size_t> sub_block(blocks_[h].begin(), blocks_[h].end());
    std::sort(sub_block.begin(), sub_block.end(),
              [&](std::size_t a, std::size_t b) { return position[a] < position[b]; });
    const std::uint64_t n = block_size(source_, sub_block);
    maps[k].resize(n);
    Assignment full(source_.size(), 0);
    std::vector<std::size_t> digits(sub_block.size(), 0);
    for (std::uint64_t idx = 0; idx < n; ++idx) {
      for (std::size_t m = 0; m < sub_block.size(); ++m) full[sub_block[m]] = digits[m];
      maps[k][idx] = block_value(h, full);
      for (std::size_t m = sub_block.size(); m-- > 0;) {
        if (++digits[m] < source_.cardinality(sub_block[m])) break;
        digits[m] = 0;
      }
    }
  }
  return Translation(source_.subsystem(source_subset), target_.subsystem(targets), std::move(omega),
                     std::move(maps));
}

Translation compose(const Translation& first, const Translation& second) {
  if (!(first.target() == second.source())) {
    throw SystemMismatch("compose: target of the first translation is not the source of the second");
  }
  const VariableSystem& src = first.source();
  std::vector<std::size_t> omega(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) omega[i] = second.omega(first.omega(i));

  std::vector<std::vector<std::size_t>> blocks(second.target().size());
  for (std::size_t i = 0; i < src.size(); ++i) blocks[omega[i]].push_back(i);

  std::vector<std::vector<std::size_t>> maps(second.target().size());
  for (std::size_t h = 0; h < maps.size(); ++h) {
    const auto& block = blocks[h];
    std::uint64_t n = block_size(src, block);
    maps[h].resize(n);
    Assignment full(src.size(), 0);
    Assignment mid(first.target().size(), 0);
    std::vector<std::size_t> digits(block.size(), 0);
    for (std::uint64_t idx = 0; idx < n; ++idx) {
      for (std::size_t m = 0; m < block.size(); ++m) full[block[m]] = digits[m];
      // Only the intermediate variables feeding h are needed, and their blocks
      // lie inside `block`.
      for (std::size_t g : second.block(h)) mid[g] = first.block_value(g, full);
      maps[h][idx] = second.block_value(h, mid);
      for (std::size_t m = block.size(); m-- > 0;) {
        if (++digits[m] < src.cardinality(block[m])) break;
        digits[m] = 0;
      }
    }
  }
  return Translation(src, second.target(), std::move(omega), std::move(maps));
}

Distribution pushforward(const Distribution& dist, const Translation& t) {
  if (!(dist.system() == t.source())) {
    throw SystemMismatch("pushforward: distribution is not over the translation's source system");
  }
  t.target().require_enumerable(kDefaultStateCap, "pushforward");
  std::vector<double> out(t.target().state_count(), 0.0);
  const auto& w = dist.weights();
  for (std::uint64_t s = 0; s < w.size(); ++s) {
    if (w[s] != 0.0) out[t.apply_state(s)] += w[s];
  }
  return Distribution(t.target(), std::move(out));
}

Action translate_action(const Action& action, const Translation& t) {
  const Action one[] = {action};
  return translate_action(std::span<const Action>(one), t).front();
}

CompoundAction translate_action(std::span<const Action> action, const Translation& t) {
  validate_action(action, t.source());
  const VariableSystem& src = t.source();
  std::vector<const Action*> by_var(src.size(), nullptr);
  for (const Action& a : action) by_var[a.target] = &a;

  std::vector<std::size_t> touched;
  for (const Action& a : action) touched.push_back(t.omega(a.target));
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

  CompoundAction out;
  for (std::size_t h : touched) {
    auto block = t.block(h);
    std::optional<ActionKind> kind;
    std::vector<std::size_t> free;
    Assignment full(src.size(), 0);
    for (std::size_t j : block) {
      if (const Action* a = by_var[j]) {
        if (kind && *kind != a->kind) {
          throw AmbiguousTranslation("action mixes observe and do inside the block of '" + t.target()[h].name +
                                     "'");
        }
        kind = a->kind;
        full[j] = a->value;
      } else {
        free.push_back(j);
      }
    }
    // The translated value must not depend on the unconstrained block members.
    std::optional<std::size_t> value;
    std::vector<std::size_t> digits(free.size(), 0);
    while (true) {
      for (std::size_t m = 0; m < free.size(); ++m) full[free[m]] = digits[m];
      const std::size_t v = t.block_value(h, full);
      if (value && *value != v) {
        throw AmbiguousTranslation("action '" + to_string(action, src) + "' does not determine '" +
                                   t.target()[h].name + "'");
      }
      value = v;
      std::size_t m = free.size();
      while (m-- > 0) {
        if (++digits[m] < src.cardinality(free[m])) break;
        digits[m] = 0;
      }
      if (m == static_cast<std::size_t>(-1)) break;
    }
    out.push_back(Action{*kind, h, *value});
  }
  return out;
}

}  // namespace equivar
