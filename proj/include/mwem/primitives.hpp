#pragma once

#include <span>
#include <vector>

#include "mwem/engine.hpp"

namespace mwem {

// Comparison, selection and transcendental protocols over replicated
// shares. All results are bit- or fixed-point-valued RepShares; every
// function is batched and must be called by the three parties in
// lockstep. Comparisons are exact whenever |x - y| < 2^63 on the signed
// view; the transcendentals hold their stated error bounds on their
// stated domains (checked against double-precision oracles in tests).

// Shares of 1 where signed(x) < signed(y), else 0. Strict: ties give 0.
std::vector<RepShare> less_than(PartyEngine& e, std::span<const RepShare> x,
                                std::span<const RepShare> y);
std::vector<RepShare> less_than_public(PartyEngine& e,
                                       std::span<const RepShare> x,
                                       std::span<const ring_t> y);
std::vector<RepShare> greater_than_public(PartyEngine& e,
                                          std::span<const RepShare> x,
                                          std::span<const ring_t> y);

// Shares of 1 where x == y.
std::vector<RepShare> equal_public(PartyEngine& e,
                                   std::span<const RepShare> x,
                                   std::span<const ring_t> y);
std::vector<RepShare> equal_shares(PartyEngine& e,
                                   std::span<const RepShare> x,
                                   std::span<const RepShare> y);

// c must open to 0 or 1; returns a if c = 1 else b. One multiply.
std::vector<RepShare> oblivious_select(PartyEngine& e,
                                       std::span<const RepShare> c,
                                       std::span<const RepShare> a,
                                       std::span<const RepShare> b);

// Balanced tournament over pairwise comparisons; exact.
RepShare maximum(PartyEngine& e, std::span<const RepShare> v);

// e^x for fixed-point x <= 0. Absolute error <= 2^-10 on [-16, 0];
// values below the fixed-point resolution clamp to 0.
std::vector<RepShare> exp_nonpositive(PartyEngine& e,
                                      std::span<const RepShare> x);

// ln(x) for fixed-point x in [2^-f, 1]; absolute error <= 2^-10.
std::vector<RepShare> log_unit_interval(PartyEngine& e,
                                        std::span<const RepShare> x);

// Jointly generated fixed-point uniform on {0, 2^-f, ..., 1 - 2^-f},
// composed from f shared random bits; no party learns the value.
RepShare unit_uniform(PartyEngine& e);
std::vector<RepShare> unit_uniform_batch(PartyEngine& e, std::size_t count);

// Jointly generated uniform bit.
RepShare random_bit(PartyEngine& e);

// Scalar conveniences.
RepShare less_than1(PartyEngine& e, RepShare x, RepShare y);
RepShare select1(PartyEngine& e, RepShare c, RepShare a, RepShare b);

}  // namespace mwem
