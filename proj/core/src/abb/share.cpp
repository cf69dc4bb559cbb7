#include "kep/abb/share.hpp"

namespace kep::abb {

ShareVector operator+(std::span<const Share> a, std::span<const Share> b) {
  if (a.size() != b.size()) throw InvalidArgument("share vector length mismatch");
  ShareVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

ShareVector operator-(std::span<const Share> a, std::span<const Share> b) {
  if (a.size() != b.size()) throw InvalidArgument("share vector length mismatch");
  ShareVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace kep::abb
