#include "clusterlab/event_core.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "clusterlab/parallel.hpp"

namespace clusterlab {

namespace {

bool words_subset(std::span<const std::uint64_t> a, const std::vector<std::uint64_t>& b) {
  for (std::size_t w = 0; w < a.size(); ++w) {
    if (a[w] & ~b[w]) return false;
  }
  return true;
}

bool words_intersect(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  for (std::size_t w = 0; w < a.size(); ++w) {
    if (a[w] & b[w]) return true;
  }
  return false;
}

std::vector<std::uint64_t> revealed_words(const EventFamily& family, const Outcome& y) {
  std::vector<std::uint64_t> out(family.word_count(), 0);
  for (auto j : y.indices()) {
    auto w = family.member_words(j);
    for (std::size_t k = 0; k < w.size(); ++k) out[k] |= w[k];
  }
  return out;
}

}  // namespace

EventFamily::EventFamily(std::uint32_t ground_size, std::uint32_t uniformity,
                         std::vector<IndexSet> members)
    : ground_size_(ground_size),
      uniformity_(uniformity),
      members_(std::move(members)),
      word_count_((ground_size + 63) / 64) {
  for (auto& m : members_) {
    std::sort(m.begin(), m.end());
    if (m.size() != uniformity_ || std::adjacent_find(m.begin(), m.end()) != m.end()) {
      throw std::invalid_argument("member does not have `uniformity` distinct elements");
    }
    if (!m.empty() && m.back() >= ground_size_) {
      throw std::out_of_range("member element outside the ground set");
    }
  }
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw std::invalid_argument("duplicate member");
  }
  words_.assign(members_.size() * word_count_, 0);
  for (std::size_t i = 0; i < members_.size(); ++i) {
    for (auto e : members_[i]) words_[i * word_count_ + e / 64] |= std::uint64_t{1} << (e % 64);
  }
}

Outcome::Outcome(const EventFamily& family, IndexSet indices)
    : family_(&family), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw std::invalid_argument("duplicate index in outcome");
  }
  if (!indices_.empty() && indices_.back() >= family.size()) {
    throw std::out_of_range("outcome index " + std::to_string(indices_.back()) + " >= N");
  }
}

bool Outcome::contains(std::uint32_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

IndexSet Outcome::complement() const {
  IndexSet out;
  out.reserve(family_->size() - indices_.size());
  std::size_t k = 0;
  for (std::uint32_t i = 0; i < family_->size(); ++i) {
    if (k < indices_.size() && indices_[k] == i) {
      ++k;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

IndexSet revealed_set(const EventFamily& family, const Outcome& y) {
  const auto words = revealed_words(family, y);
  IndexSet out;
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (std::uint64_t x = words[w]; x; x &= x - 1) {
      out.push_back(static_cast<std::uint32_t>(w * 64 + std::countr_zero(x)));
    }
  }
  return out;
}

bool overlaps(const EventFamily& family, std::size_t i, std::size_t j) {
  if (i >= family.size() || j >= family.size()) throw std::out_of_range("member index >= N");
  return i != j && words_intersect(family.member_words(i), family.member_words(j));
}

IndexClasses classify_indices(const EventFamily& family, const Outcome& y) {
  IndexClasses out;
  for (auto j : y.complement()) {
    int hits = 0;
    for (auto i : y.indices()) {
      if (words_intersect(family.member_words(i), family.member_words(j)) && ++hits == 2) break;
    }
    (hits == 0 ? out.neutral : hits == 1 ? out.simple : out.complex).push_back(j);
  }
  return out;
}

bool is_possible(const EventFamily& family, const Outcome& y) {
  const auto revealed = revealed_words(family, y);
  for (auto j : y.complement()) {
    if (words_subset(family.member_words(j), revealed)) return false;
  }
  return true;
}

Outcome realized_outcome(const EventFamily& family, const IndexSet& subset) {
  std::vector<std::uint64_t> words(family.word_count(), 0);
  for (auto e : subset) {
    if (e >= family.ground_size()) throw std::out_of_range("ground element out of range");
    words[e / 64] |= std::uint64_t{1} << (e % 64);
  }
  IndexSet out;
  for (std::uint32_t i = 0; i < family.size(); ++i) {
    if (words_subset(family.member_words(i), words)) out.push_back(i);
  }
  return Outcome(family, std::move(out));
}

IndexSet default_chain_order(const EventFamily& family, const Outcome& y) {
  auto classes = classify_indices(family, y);
  IndexSet order = std::move(classes.neutral);
  order.insert(order.end(), classes.simple.begin(), classes.simple.end());
  order.insert(order.end(), classes.complex.begin(), classes.complex.end());
  return order;
}

ChainReport conditional_chain(const EventFamily& family, const Outcome& y, const Rational& p,
                              const ChainOptions& options) {
  if (sgn(p) <= 0 || p >= 1) throw std::invalid_argument("conditional_chain needs 0 < p < 1");
  ChainReport report;
  report.order = options.order ? *options.order : default_chain_order(family, y);
  {
    IndexSet sorted = report.order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != y.complement()) throw std::invalid_argument("order is not a permutation of Y^c");
  }
  if (!is_possible(family, y)) throw std::invalid_argument("outcome is not possible");

  const auto revealed = revealed_words(family, y);
  std::vector<std::uint32_t> free_elements;
  for (std::uint32_t e = 0; e < family.ground_size(); ++e) {
    if (!((revealed[e / 64] >> (e % 64)) & 1u)) free_elements.push_back(e);
  }
  const auto free_count = static_cast<std::uint32_t>(free_elements.size());
  report.revealed_size = family.ground_size() - free_count;
  check_guard(free_count <= options.max_free_elements && free_count < 63,
              "conditional_chain: " + std::to_string(free_count) + " free ground elements");

  // Residuals E_j \ R(Y) as masks over the free elements, in chain order.
  std::vector<std::uint64_t> residual;
  residual.reserve(report.order.size());
  for (auto j : report.order) {
    std::uint64_t m = 0;
    for (std::uint32_t b = 0; b < free_count; ++b) {
      const auto e = free_elements[b];
      if ((family.member_words(j)[e / 64] >> (e % 64)) & 1u) m |= std::uint64_t{1} << b;
    }
    residual.push_back(m);
  }

  // counts[pos][w]: subsets Z of size w whose first contained residual is at
  // `pos` (pos == order.size() means none).
  const std::size_t positions = residual.size() + 1;
  const std::size_t width = free_count + 1;
  const std::uint64_t total = std::uint64_t{1} << free_count;
  const unsigned chunk_bits = std::min<std::uint32_t>(free_count, 6);
  const std::size_t chunks = std::size_t{1} << chunk_bits;
  const std::uint64_t per_chunk = total >> chunk_bits;
  std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(positions * width));
  parallel_tasks(chunks, options.workers, [&](std::size_t c, unsigned) {
    auto& counts = partial[c];
    for (std::uint64_t z = c * per_chunk; z < (c + 1) * per_chunk; ++z) {
      std::size_t pos = 0;
      while (pos < residual.size() && (residual[pos] & ~z) != 0) ++pos;
      ++counts[pos * width + static_cast<std::size_t>(std::popcount(z))];
    }
  });
  std::vector<std::uint64_t> counts(positions * width, 0);
  for (const auto& part : partial) {
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += part[k];
  }

  const Rational q = 1 - p;
  std::vector<Rational> weight(width);
  for (std::uint32_t w = 0; w <= free_count; ++w) {
    weight[w] = rational_pow(p, w) * rational_pow(q, static_cast<long>(free_count - w));
  }
  std::vector<Rational> mass(positions);
  for (std::size_t pos = 0; pos < positions; ++pos) {
    for (std::size_t w = 0; w < width; ++w) {
      const unsigned long c = counts[pos * width + w];
      if (c) mass[pos] += c * weight[w];
    }
  }
  Rational remaining = 1;  // Pr(no residual at an earlier position)
  report.product_prob = rational_pow(p, report.revealed_size);
  for (std::size_t pos = 0; pos + 1 < positions; ++pos) {
    Rational pi = mass[pos] / remaining;
    report.product_prob *= 1 - pi;
    report.pi_seq.push_back(std::move(pi));
    remaining -= mass[pos];
  }
  return report;
}

bool is_symmetric_family(const EventFamily& family) {
  check_guard(family.ground_size() <= 9, "is_symmetric_family: ground set larger than 9");
  if (family.size() <= 1) return true;
  const std::set<IndexSet> members(family.members().begin(), family.members().end());
  std::map<IndexSet, std::size_t> index;
  for (std::size_t i = 0; i < family.size(); ++i) index[family.member(i)] = i;
  std::vector<bool> reached(family.size(), false);
  std::vector<std::uint32_t> perm(family.ground_size());
  std::iota(perm.begin(), perm.end(), 0u);
  do {
    bool automorphism = true;
    IndexSet image0;
    for (std::size_t i = 0; i < family.size() && automorphism; ++i) {
      IndexSet image;
      for (auto e : family.member(i)) image.push_back(perm[e]);
      std::sort(image.begin(), image.end());
      automorphism = members.count(image) != 0;
      if (i == 0) image0 = std::move(image);
    }
    if (automorphism) reached[index[image0]] = true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::all_of(reached.begin(), reached.end(), [](bool b) { return b; });
}

}  // namespace clusterlab
