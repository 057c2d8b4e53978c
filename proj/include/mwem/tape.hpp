#pragma once

#include <cstdint>
#include <memory>
#include <random>

namespace mwem {

// Source of single bits for the joint-randomness protocols. The pinned
// tape used by cross-mode equivalence tests is a PrngBits stream whose
// seed both execution modes share; bits are always consumed MSB-first
// through next_bits so the two modes read identical values.
class BitSource {
 public:
  virtual ~BitSource() = default;
  virtual int next_bit() = 0;

  std::uint64_t next_bits(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; i++) v = (v << 1) | std::uint64_t(next_bit());
    return v;
  }
};

class PrngBits : public BitSource {
 public:
  explicit PrngBits(std::uint64_t seed) : gen_(seed) {}

  int next_bit() override {
    if (left_ == 0) {
      buf_ = gen_();
      left_ = 64;
    }
    left_--;
    return int((buf_ >> left_) & 1);
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t buf_ = 0;
  int left_ = 0;
};

// Contributes nothing: the other parties' tape-mode stand-in, so the
// XOR-combined joint value equals the tape stream exactly.
class ZeroBits : public BitSource {
 public:
  int next_bit() override { return 0; }
};

// Uniform doubles derived from a mt19937_64 the same way on every
// platform (53 mantissa bits), for the plaintext mechanisms and samplers.
class PlainRng {
 public:
  explicit PlainRng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1].
  double uniform_open_left() { return 1.0 - uniform(); }
  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mwem
