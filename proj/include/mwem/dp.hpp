#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mwem/engine.hpp"
#include "mwem/tape.hpp"

namespace mwem {

// Budget split of the iterative mechanism: each of the T rounds spends
// eps/2T on selection and eps/2T on measurement, composing to eps total.
struct PrivacyBudget {
  double epsilon = 1.0;
  int iterations = 10;

  void validate() const;
  double eps_prime() const { return epsilon / (2.0 * iterations); }
  double laplace_scale() const { return 2.0 * iterations / epsilon; }
};

// The randomness the two execution modes must share for the pinned-tape
// equivalence tests: the selection threshold draw, the Laplace uniform,
// and the Laplace sign. The tape flavour consumes exactly the bits the
// MPC protocols consume, in the same order.
class JointRandom {
 public:
  virtual ~JointRandom() = default;
  virtual double selection_unit() = 0;  // uniform on [0, 1)
  virtual double laplace_unit() = 0;    // uniform on (0, 1]
  virtual int sign_bit() = 0;           // uniform {0, 1}
};

class PlainJointRandom : public JointRandom {
 public:
  explicit PlainJointRandom(std::uint64_t seed) : rng_(seed) {}
  double selection_unit() override { return rng_.uniform(); }
  double laplace_unit() override { return rng_.uniform_open_left(); }
  int sign_bit() override { return int(rng_.next_u64() & 1); }

 private:
  PlainRng rng_;
};

// Discrete draws from a tape stream: f-bit uniforms, mirroring the joint
// generation in the protocols bit for bit.
class TapeJointRandom : public JointRandom {
 public:
  TapeJointRandom(std::uint64_t tape_seed, int frac_bits)
      : bits_(tape_seed), frac_bits_(frac_bits) {}
  double selection_unit() override {
    return double(bits_.next_bits(frac_bits_)) * std::exp2(-frac_bits_);
  }
  double laplace_unit() override { return 1.0 - selection_unit(); }
  int sign_bit() override { return bits_.next_bit(); }

 private:
  PrngBits bits_;
  int frac_bits_;
};

// Exponential-mechanism selection over plaintext scores: weight
// exp(0.5 * eps' * score), max-subtraction, cumulative threshold scan.
// Returns the 1-based query number; N when the scan exhausts.
// boundary_gap, when given, receives the distance from the threshold to
// the nearest cumulative sum: selections closer than the fixed-point
// resolution may legitimately differ from the secure path.
std::size_t em_select_plain(std::span<const double> scores, double eps_prime,
                            JointRandom& rnd, double* boundary_gap = nullptr);

// value + b * ln(u) * c with u uniform on (0,1] and c uniform on {-1,+1}.
double laplace_plain(double value, double b, JointRandom& rnd);

// Secure selection: shared true answers vs public approximate answers.
// Only the selected index is ever opened; the score shaping, max
// subtraction, exponentials, cumulative sums and threshold count all
// stay shared. Returns the opened 1-based index.
std::size_t em_select_mpc(PartyEngine& e, std::span<const RepShare> shared_answers,
                          std::span<const double> approx_answers,
                          double eps_prime);

// Many independent selections over the same answers with their message
// rounds interleaved (the weight pipeline runs once per batch, each
// trial draws its own threshold). Distributionally identical to calling
// em_select_mpc `trials` times.
std::vector<std::size_t> em_select_mpc_batch(
    PartyEngine& e, std::span<const RepShare> shared_answers,
    std::span<const double> approx_answers, double eps_prime,
    std::size_t trials);

// The sampling stage alone (cumulative sums + threshold): counts strict
// "greater than", corrects the all-below edge to N, opens the index.
// Split out so the edge paths can be driven with a forced threshold.
std::size_t em_sample_stage(PartyEngine& e, std::span<const RepShare> cumulative,
                            RepShare threshold);

// Secure measurement: opens q(D) + b * ln(x) * c with x jointly uniform
// on [2^-f, 1] and c a jointly uniform sign. The tail of the noise is
// truncated at b * f * ln2 by the discrete draw.
double laplace_measure_mpc(PartyEngine& e, RepShare shared_answer, double b);

// Batched independent measurements of the same shared answer.
std::vector<double> laplace_measure_mpc_batch(PartyEngine& e,
                                              RepShare shared_answer, double b,
                                              std::size_t trials);

}  // namespace mwem
