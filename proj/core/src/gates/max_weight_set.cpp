#include "kep/error.hpp"
#include "kep/gates/gates.hpp"

namespace kep::gates {

MaxWeightSet max_weight_set(Party& party, const SubsetEncoding& enc, std::size_t subset_count,
                            std::size_t node_count) {
  party.record_gate("max_weight_set");
  const std::size_t n = enc.weights.size();
  const std::size_t width = enc.nodes.cols();
  if (enc.indices.size() != n || enc.nodes.rows() != n) {
    throw InvalidArgument("subset encoding has inconsistent lengths");
  }

  // Row layout per candidate: index, nodes..., weight.
  const std::size_t stride = width + 2;
  ShareVector rows(n * stride);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i * stride] = enc.indices[i];
    for (std::size_t c = 0; c < width; ++c) rows[i * stride + 1 + c] = enc.nodes(i, c);
    rows[i * stride + stride - 1] = enc.weights[i];
  }

  std::size_t size = n;
  while (size > 1) {
    const std::size_t pairs = size / 2;
    ShareVector left(pairs), right(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
      // The +1 lets the earlier candidate win ties.
      left[i] = party.add_const(rows[(2 * i) * stride + stride - 1], 1);
      right[i] = rows[(2 * i + 1) * stride + stride - 1];
    }
    const auto first_wins = gt(party, left, right);

    ShareVector z(pairs * stride), x(pairs * stride), y(pairs * stride);
    for (std::size_t i = 0; i < pairs; ++i) {
      for (std::size_t c = 0; c < stride; ++c) {
        z[i * stride + c] = first_wins[i];
        x[i * stride + c] = rows[(2 * i) * stride + c];
        y[i * stride + c] = rows[(2 * i + 1) * stride + c];
      }
    }
    auto next = select(party, z, x, y);
    if (size % 2 == 1) {
      next.insert(next.end(), rows.begin() + (size - 1) * stride, rows.begin() + size * stride);
    }
    rows = std::move(next);
    size = size / 2 + size % 2;
  }

  MaxWeightSet out;
  out.nodes.assign(width, party.constant(node_count));
  out.index = party.constant(subset_count);
  if (n == 0) return out;

  const Share valid = gt(party, rows[stride - 1], Share{});
  ShareVector z(stride - 1, valid);
  ShareVector dummy(stride - 1, party.constant(node_count));
  dummy[0] = party.constant(subset_count);
  const auto chosen =
      select(party, z, std::span<const Share>(rows).first(stride - 1), dummy);
  out.index = chosen[0];
  out.nodes.assign(chosen.begin() + 1, chosen.end());
  return out;
}

}  // namespace kep::gates
