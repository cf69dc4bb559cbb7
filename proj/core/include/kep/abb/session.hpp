#pragma once

#include <array>
#include <exception>
#include <functional>
#include <thread>
#include <type_traits>

#include "kep/abb/party.hpp"
#include "kep/error.hpp"
#include "kep/transport/local.hpp"

namespace kep::abb {

/// Runs `fn(party)` for all three peers on threads connected by an
/// in-process hub and returns the three results (index = peer id).
///
/// If any peer throws, the hub is closed so the others unblock, and the first
/// error that is not a consequence of the shutdown is rethrown.
template <typename Fn>
auto run_local(const PartyOptions& options, Fn&& fn) {
  using Result = std::invoke_result_t<Fn&, Party&>;
  static_assert(!std::is_void_v<Result>, "session function must return a value");

  transport::LocalHub hub;
  std::array<Result, 3> results{};
  std::array<std::exception_ptr, 3> errors{};
  std::array<bool, 3> closed_only{};
  std::array<std::thread, 3> threads;
  for (PeerId p = 0; p < 3; ++p) {
    threads[p] = std::thread([&, p] {
      try {
        auto channel = hub.endpoint(p);
        Party party(*channel, options);
        results[p] = fn(party);
      } catch (const ChannelClosed&) {
        errors[p] = std::current_exception();
        closed_only[p] = true;
        hub.close_all();
      } catch (...) {
        errors[p] = std::current_exception();
        hub.close_all();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (PeerId p = 0; p < 3; ++p) {
    if (errors[p] && !closed_only[p]) std::rethrow_exception(errors[p]);
  }
  for (PeerId p = 0; p < 3; ++p) {
    if (errors[p]) std::rethrow_exception(errors[p]);
  }
  return results;
}

}  // namespace kep::abb
