#pragma once

#include <array>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <variant>

#include "mwem/engine.hpp"
#include "mwem/transport.hpp"

namespace mwem {

struct SimOptions {
  FixedCodec codec{};
  std::uint64_t seed = 1;
  // Pinned joint-randomness tape: party 0 reads the tape stream, the
  // others contribute zero bits, so jointly generated values equal the
  // tape exactly. Voids the DP guarantee; test use only.
  std::optional<std::uint64_t> tape_seed;
};

inline std::unique_ptr<BitSource> joint_bit_source(const SimOptions& opts,
                                                   int party) {
  if (!opts.tape_seed) return nullptr;
  if (party == 0) return std::make_unique<PrngBits>(*opts.tape_seed);
  return std::make_unique<ZeroBits>();
}

namespace detail {

template <class R>
struct SimResult {
  std::optional<R> value;
  template <class F, class... A>
  void run(F&& f, A&&... a) {
    value.emplace(f(std::forward<A>(a)...));
  }
  R take() { return std::move(*value); }
};

template <>
struct SimResult<void> {
  template <class F, class... A>
  void run(F&& f, A&&... a) {
    f(std::forward<A>(a)...);
  }
  void take() {}
};

}  // namespace detail

// Runs fn(PartyEngine&) concurrently for the three parties over an
// in-process mesh, with the optional extra(Transport&) playing the
// coordinator on endpoint 3. First exception wins and unblocks the rest.
template <class F, class C>
auto sim_parties_with(const SimOptions& opts, F fn, C extra) {
  using R = std::invoke_result_t<F, PartyEngine&>;
  MemHub hub;
  std::array<detail::SimResult<R>, 3> results;
  std::exception_ptr error;
  std::mutex error_mu;

  auto guard = [&](auto body) {
    try {
      body();
    } catch (...) {
      {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
      hub.close_all();
    }
  };

  std::array<std::thread, 3> threads;
  for (int p = 0; p < 3; p++) {
    threads[p] = std::thread([&, p] {
      guard([&] {
        auto transport = hub.endpoint(p);
        PartyEngine engine(p, *transport, opts.codec, opts.seed + 1000 * p,
                           joint_bit_source(opts, p));
        results[p].run(fn, engine);
      });
    });
  }

  std::thread coordinator;
  if constexpr (!std::is_same_v<C, std::nullptr_t>) {
    coordinator = std::thread([&] {
      guard([&] {
        auto transport = hub.endpoint(kCoordinatorId);
        extra(*transport);
      });
    });
  } else {
    (void)extra;
  }

  for (auto& t : threads) t.join();
  if (coordinator.joinable()) coordinator.join();
  if (error) std::rethrow_exception(error);

  if constexpr (!std::is_void_v<R>) {
    return std::array<R, 3>{results[0].take(), results[1].take(),
                            results[2].take()};
  }
}

template <class F>
auto sim_parties(const SimOptions& opts, F fn) {
  return sim_parties_with(opts, fn, nullptr);
}

}  // namespace mwem
