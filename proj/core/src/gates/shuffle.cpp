#include <algorithm>
#include <numeric>
#include <string>

#include "kep/error.hpp"
#include "kep/gates/gates.hpp"

namespace kep::gates {

namespace {

constexpr std::uint64_t kSeededPassLabel = 0x7368756666000000ull;
constexpr std::uint64_t kSeededRowLabel = 0x726f777300000000ull;

std::vector<std::uint32_t> seeded_pass(std::uint64_t seed, unsigned pass, std::size_t n,
                                       std::uint64_t label = kSeededPassLabel) {
  abb::Prg prg(abb::Prg::derive_key(seed, label + pass), 0);
  return abb::random_permutation(prg, n);
}

// out(pi(i), pi(j)) = in(i, j), applied to each matrix stored back to back.
std::vector<Ring> relabel(std::span<const Ring> in, std::size_t n, std::size_t count,
                          const std::vector<std::uint32_t>& pi) {
  std::vector<Ring> out(in.size());
  for (std::size_t m = 0; m < count; ++m) {
    const std::size_t base = m * n * n;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        out[base + pi[i] * n + pi[j]] = in[base + i * n + j];
      }
    }
  }
  return out;
}

// out row pi(i) = in row i.
std::vector<Ring> move_rows(std::span<const Ring> in, std::size_t width,
                               const std::vector<std::uint32_t>& pi) {
  std::vector<Ring> out(in.size());
  for (std::size_t i = 0; i < pi.size(); ++i)
    std::copy_n(in.begin() + i * width, width, out.begin() + pi[i] * width);
  return out;
}

}  // namespace

struct ShuffleAccess {
  static void set_size(SecretPermutation& s, std::size_t n) { s.size_ = n; }
  static auto& passes(SecretPermutation& s) { return s.passes_; }
  static const auto& passes(const SecretPermutation& s) { return s.passes_; }
};

namespace {

// One resharing pass: peers `leader` and leader+1 together hold every value
// (leader: x_j + x_{j+1}, helper: x_{j+2}), relabel locally with `pi`, and
// reshare so the third peer never sees pi.
template <typename Relabel>
std::vector<Share> pass(Party& party, unsigned leader, std::span<const Share> values,
                        const std::optional<std::vector<std::uint32_t>>& pi, Relabel relabel) {
  std::vector<Ring> local;
  if (pi) {
    std::vector<Ring> mine(values.size());
    const bool is_leader = party.id() == leader;
    for (std::size_t i = 0; i < values.size(); ++i) {
      mine[i] = is_leader ? values[i].first + values[i].second : values[i].second;
    }
    local = relabel(mine, *pi);
  }
  return party.reshare_pair(leader, local, values.size());
}

}  // namespace

namespace {

std::vector<std::uint32_t> compose_seeded(std::uint64_t seed, std::size_t n, std::uint64_t label) {
  std::vector<std::uint32_t> composed(n);
  std::iota(composed.begin(), composed.end(), 0u);
  for (unsigned j = 0; j < 3; ++j) {
    const auto pi = seeded_pass(seed, j, n, label);
    for (auto& v : composed) v = pi[v];
  }
  return composed;
}

}  // namespace

std::vector<std::uint32_t> seeded_permutation(std::uint64_t seed, std::size_t n) {
  return compose_seeded(seed, n, kSeededPassLabel);
}

std::vector<std::uint32_t> seeded_row_permutation(std::uint64_t seed, std::size_t n) {
  return compose_seeded(seed, n, kSeededRowLabel);
}

SecretPermutation shuffle_nodes(Party& party, std::span<ShareMatrix*> matrices,
                                const ShuffleOptions& options) {
  party.record_gate("shuffle");
  if (matrices.empty()) throw InvalidArgument("shuffle needs at least one matrix");
  const std::size_t n = matrices.front()->rows();
  for (const auto* m : matrices) {
    if (m->rows() != n || m->cols() != n) throw InvalidArgument("shuffle needs equal square matrices");
  }

  SecretPermutation sigma;
  ShuffleAccess::set_size(sigma, n);
  auto& passes = ShuffleAccess::passes(sigma);

  ShareVector values;
  values.reserve(matrices.size() * n * n);
  for (const auto* m : matrices) values.insert(values.end(), m->data().begin(), m->data().end());

  for (unsigned j = 0; j < 3; ++j) {
    const bool in_pair = party.id() == j || party.id() == (j + 1) % 3;
    if (in_pair) {
      switch (options.mode) {
        case ShuffleMode::kRandom:
          passes[j] = abb::random_permutation(party.pair_stream(j), n);
          break;
        case ShuffleMode::kSeeded:
          passes[j] = seeded_pass(options.seed, j, n);
          break;
        case ShuffleMode::kIdentity:
          passes[j].emplace(n);
          std::iota(passes[j]->begin(), passes[j]->end(), 0u);
          break;
      }
    }
    values = pass(party, j, values, passes[j], [&](std::span<const Ring> in, const auto& pi) {
      return relabel(in, n, matrices.size(), pi);
    });
  }

  for (std::size_t m = 0; m < matrices.size(); ++m) {
    std::copy(values.begin() + m * n * n, values.begin() + (m + 1) * n * n,
              matrices[m]->data().begin());
  }
  return sigma;
}

ShareMatrix rev_shuffle(Party& party, const ShareMatrix& a, const SecretPermutation& sigma) {
  party.record_gate("rev_shuffle");
  const std::size_t n = sigma.size();
  if (a.rows() != n || a.cols() != n) {
    throw InvalidArgument("rev_shuffle size mismatch: permutation of " + std::to_string(n) +
                          ", matrix " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  const auto& passes = ShuffleAccess::passes(sigma);
  ShareVector values = a.data();
  for (int j = 2; j >= 0; --j) {
    std::optional<std::vector<std::uint32_t>> inverse;
    if (passes[j]) inverse = abb::invert_permutation(*passes[j]);
    values = pass(party, static_cast<unsigned>(j), values, inverse,
                  [&](std::span<const Ring> in, const auto& pi) { return relabel(in, n, 1, pi); });
  }
  ShareMatrix out(n, n);
  out.data() = std::move(values);
  return out;
}

SecretPermutation row_permutation(Party& party, std::size_t n, const ShuffleOptions& options) {
  SecretPermutation sigma;
  ShuffleAccess::set_size(sigma, n);
  auto& passes = ShuffleAccess::passes(sigma);
  for (unsigned j = 0; j < 3; ++j) {
    if (party.id() != j && party.id() != (j + 1) % 3) continue;
    switch (options.mode) {
      case ShuffleMode::kRandom:
        passes[j] = abb::random_permutation(party.pair_stream(j), n);
        break;
      case ShuffleMode::kSeeded:
        passes[j] = seeded_pass(options.seed, j, n, kSeededRowLabel);
        break;
      case ShuffleMode::kIdentity:
        passes[j].emplace(n);
        std::iota(passes[j]->begin(), passes[j]->end(), 0u);
        break;
    }
  }
  return sigma;
}

ShareMatrix permute_rows(Party& party, const ShareMatrix& a, const SecretPermutation& sigma) {
  party.record_gate("permute_rows");
  if (a.rows() != sigma.size())
    throw InvalidArgument("permute_rows size mismatch: permutation of " +
                          std::to_string(sigma.size()) + ", matrix with " +
                          std::to_string(a.rows()) + " rows");
  const std::size_t width = a.cols();
  const auto& passes = ShuffleAccess::passes(sigma);
  ShareVector values = a.data();
  for (unsigned j = 0; j < 3; ++j) {
    values = pass(party, j, values, passes[j], [&](std::span<const Ring> in, const auto& perm) {
      return move_rows(in, width, perm);
    });
  }
  ShareMatrix out(a.rows(), width);
  out.data() = std::move(values);
  return out;
}

}  // namespace kep::gates
