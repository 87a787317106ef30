#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ndlhs {

struct unsupported_order_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Finite field GF(p^k) for q up to 4096. Elements are integers 0..q-1 encoding
// base-p digit vectors; addition is digit-wise, multiplication runs through
// discrete log tables built from a fixed primitive polynomial per (p,k) so the
// arithmetic is identical on every platform.
class GaloisField {
 public:
  explicit GaloisField(int q) : q_(q) {
    if (q < 2) throw std::invalid_argument("GaloisField: order must be at least 2");
    if (q > 4096)
      throw unsupported_order_error("GaloisField: order " + std::to_string(q) +
                                    " exceeds the supported maximum 4096");
    factorize();
    build_tables();
  }

  int q() const { return q_; }
  int p() const { return p_; }
  int k() const { return k_; }

  int add(int a, int b) const {
    check(a); check(b);
    if (p_ == 2) return a ^ b;
    return digitwise(a, b, +1);
  }

  int sub(int a, int b) const {
    check(a); check(b);
    if (p_ == 2) return a ^ b;
    return digitwise(a, b, -1);
  }

  int neg(int a) const { return sub(0, a); }

  int mul(int a, int b) const {
    check(a); check(b);
    if (a == 0 || b == 0) return 0;
    return exp_[static_cast<std::size_t>((log_[static_cast<std::size_t>(a)] +
                                          log_[static_cast<std::size_t>(b)]) % (q_ - 1))];
  }

  int inv(int a) const {
    check(a);
    if (a == 0) throw std::invalid_argument("GaloisField: zero has no inverse");
    const int e = log_[static_cast<std::size_t>(a)];
    return exp_[static_cast<std::size_t>((q_ - 1 - e) % (q_ - 1))];
  }

 private:
  void check(int a) const {
    if (a < 0 || a >= q_)
      throw std::invalid_argument("GaloisField: element " + std::to_string(a) +
                                  " outside 0.." + std::to_string(q_ - 1));
  }

  void factorize() {
    int p = 2;
    while (p * p <= q_ && q_ % p != 0) ++p;
    if (p * p > q_) p = q_;
    int v = q_, k = 0;
    while (v % p == 0) { v /= p; ++k; }
    if (v != 1)
      throw std::invalid_argument("GaloisField: order " + std::to_string(q_) +
                                  " is not a prime power");
    p_ = p;
    k_ = k;
  }

  int digitwise(int a, int b, int sign) const {
    int out = 0, place = 1;
    for (int d = 0; d < k_; ++d) {
      const int da = (a / place) % p_;
      const int db = (b / place) % p_;
      const int dr = ((da + sign * db) % p_ + p_) % p_;
      out += dr * place;
      place *= p_;
    }
    return out;
  }

  // f = x^k + c_{k-1} x^{k-1} + ... + c_0, listed as {c_0, ..., c_{k-1}}.
  // Every entry is primitive over GF(p); the constructor re-verifies the
  // generator cycle, so a broken entry cannot produce wrong arithmetic silently.
  static const std::vector<int>* poly_for(int p, int k) {
    static const std::vector<std::vector<int>> p2 = {
        {1}, {1, 1}, {1, 1, 0}, {1, 1, 0, 0}, {1, 0, 1, 0, 0},
        {1, 1, 0, 0, 0, 0}, {1, 1, 0, 0, 0, 0, 0}, {1, 0, 1, 1, 1, 0, 0, 0},
        {1, 0, 0, 0, 1, 0, 0, 0, 0}, {1, 0, 0, 1, 0, 0, 0, 0, 0, 0},
        {1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0}, {1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0}};
    static const std::vector<std::vector<int>> p3 = {
        {2, 2}, {1, 2, 0}, {2, 0, 0, 2}};
    static const std::vector<std::vector<int>> p5 = {
        {2, 4}, {3, 3, 0}, {2, 4, 4, 0}};
    static const std::vector<std::vector<int>> p7 = {
        {3, 6}, {4, 0, 6}, {3, 4, 5, 0}};
    if (p == 2 && k >= 1 && k <= 12) return &p2[static_cast<std::size_t>(k - 1)];
    if (p == 3 && k >= 2 && k <= 4) return &p3[static_cast<std::size_t>(k - 2)];
    if (p == 5 && k >= 2 && k <= 4) return &p5[static_cast<std::size_t>(k - 2)];
    if (p == 7 && k >= 2 && k <= 4) return &p7[static_cast<std::size_t>(k - 2)];
    return nullptr;
  }

  void build_tables() {
    exp_.assign(static_cast<std::size_t>(q_ - 1), 0);
    log_.assign(static_cast<std::size_t>(q_), -1);
    if (k_ == 1) {
      const int g = smallest_primitive_root();
      int e = 1;
      for (int i = 0; i < q_ - 1; ++i) {
        exp_[static_cast<std::size_t>(i)] = e;
        log_[static_cast<std::size_t>(e)] = i;
        e = static_cast<int>(static_cast<std::int64_t>(e) * g % p_);
      }
      return;
    }
    const std::vector<int>* poly = poly_for(p_, k_);
    if (!poly)
      throw unsupported_order_error(
          "GaloisField: no primitive polynomial for p=" + std::to_string(p_) +
          " k=" + std::to_string(k_) +
          " (supported: p=2 k<=12; p in {3,5,7} k<=4; any prime with k=1)");
    // reduction of x^k: x^k = -c_{k-1} x^{k-1} - ... - c_0
    std::vector<int> red(static_cast<std::size_t>(k_));
    for (int d = 0; d < k_; ++d)
      red[static_cast<std::size_t>(d)] = (p_ - (*poly)[static_cast<std::size_t>(d)] % p_) % p_;
    int e = 1;
    for (int i = 0; i < q_ - 1; ++i) {
      if (e == 0 || log_[static_cast<std::size_t>(e)] != -1)
        throw std::logic_error("GaloisField: polynomial table entry for p=" +
                               std::to_string(p_) + " k=" + std::to_string(k_) +
                               " is not primitive");
      exp_[static_cast<std::size_t>(i)] = e;
      log_[static_cast<std::size_t>(e)] = i;
      e = mul_by_x(e, red);
    }
    if (e != 1)
      throw std::logic_error("GaloisField: generator cycle did not close for q=" +
                             std::to_string(q_));
  }

  int mul_by_x(int v, const std::vector<int>& red) const {
    int place = 1;
    for (int d = 0; d < k_ - 1; ++d) place *= p_;
    const int top = v / place;        // coefficient of x^{k-1}
    const int shifted = (v - top * place) * p_;
    if (top == 0) return shifted;
    int out = shifted, pl = 1;
    for (int d = 0; d < k_; ++d) {
      const int ds = (shifted / pl) % p_;
      const int dr = (ds + top * red[static_cast<std::size_t>(d)]) % p_;
      out += (dr - ds) * pl;
      pl *= p_;
    }
    return out;
  }

  int smallest_primitive_root() const {
    for (int g = 2; g < p_; ++g) {
      int e = 1, order = 0;
      do {
        e = static_cast<int>(static_cast<std::int64_t>(e) * g % p_);
        ++order;
      } while (e != 1);
      if (order == p_ - 1) return g;
    }
    if (p_ == 2) return 1;
    throw std::logic_error("GaloisField: no primitive root found");
  }

  int q_, p_ = 0, k_ = 0;
  std::vector<int> exp_, log_;
};

}  // namespace ndlhs
