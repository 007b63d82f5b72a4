#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "ergtower/pauli.hpp"

using namespace ergtower;

namespace {

using Mat = Eigen::MatrixXcd;

PauliString from_text(const std::string& s) {
  PauliString p(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 'X' || s[i] == 'Y') p.x().set(i);
    if (s[i] == 'Z' || s[i] == 'Y') p.z().set(i);
  }
  return p;
}

PauliString random_pauli(std::mt19937& rng, std::size_t n) {
  PauliString p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.x().set(i, rng() & 1u);
    p.z().set(i, rng() & 1u);
  }
  return p;
}

// dense oracle: qubit 0 is the most significant tensor factor
Mat kron_all(const std::vector<Mat>& fs) {
  Mat out = Mat::Identity(1, 1);
  for (const auto& f : fs) {
    Mat next(out.rows() * f.rows(), out.cols() * f.cols());
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      for (Eigen::Index c = 0; c < out.cols(); ++c) {
        next.block(r * f.rows(), c * f.cols(), f.rows(), f.cols()) = out(r, c) * f;
      }
    }
    out = next;
  }
  return out;
}

Mat dense(const PauliString& p) {
  Mat X(2, 2), Z(2, 2), I = Mat::Identity(2, 2);
  X << 0, 1, 1, 0;
  Z << 1, 0, 0, -1;
  std::vector<Mat> xs, zs;
  for (std::size_t i = 0; i < p.size(); ++i) {
    xs.push_back(p.x().get(i) ? X : I);
    zs.push_back(p.z().get(i) ? Z : I);
  }
  return static_cast<double>(p.sign()) * kron_all(xs) * kron_all(zs);
}

Mat dense_cnot(std::size_t n, std::size_t c, std::size_t t) {
  const std::size_t dim = std::size_t{1} << n;
  Mat u = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) {
    std::size_t out = b;
    if (b >> (n - 1 - c) & 1u) out ^= std::size_t{1} << (n - 1 - t);
    u(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(b)) = 1;
  }
  return u;
}

}  // namespace

TEST(Pauli, ConjugationTable) {
  // control 0, target 1
  EXPECT_EQ(cnot_conjugate(from_text("XI"), 0, 1), from_text("XX"));
  EXPECT_EQ(cnot_conjugate(from_text("IX"), 0, 1), from_text("IX"));
  EXPECT_EQ(cnot_conjugate(from_text("ZI"), 0, 1), from_text("ZI"));
  EXPECT_EQ(cnot_conjugate(from_text("IZ"), 0, 1), from_text("ZZ"));
  // and the reverse direction of each arrow
  EXPECT_EQ(cnot_conjugate(from_text("XX"), 0, 1), from_text("XI"));
  EXPECT_EQ(cnot_conjugate(from_text("ZZ"), 0, 1), from_text("IZ"));
}

TEST(Pauli, ConjugationMatchesDenseMatrices) {
  std::mt19937 rng(23);
  for (int it = 0; it < 300; ++it) {
    const std::size_t n = 2 + rng() % 2;
    const std::size_t c = rng() % n;
    const std::size_t t = (c + 1 + rng() % (n - 1)) % n;
    const auto p = random_pauli(rng, n);
    const Mat u = dense_cnot(n, c, t);
    const Mat expect = u * dense(p) * u.adjoint();
    EXPECT_LT((dense(cnot_conjugate(p, c, t)) - expect).norm(), 1e-12);
  }
}

TEST(Pauli, RandomInvolutionAndSymplecticForm) {
  std::mt19937 rng(1234);
  for (int it = 0; it < 10000; ++it) {
    const std::size_t n = 2 + rng() % 5;
    const std::size_t c = rng() % n;
    const std::size_t t = (c + 1 + rng() % (n - 1)) % n;
    const auto p = random_pauli(rng, n);
    const auto q = random_pauli(rng, n);
    const auto p2 = cnot_conjugate(p, c, t);
    const auto q2 = cnot_conjugate(q, c, t);
    ASSERT_EQ(cnot_conjugate(p2, c, t), p);
    ASSERT_EQ(commutes(p, q), commutes(p2, q2));
    ASSERT_EQ(p2.sign(), 1);
  }
}

TEST(Pauli, ConjugationIsAHomomorphism) {
  std::mt19937 rng(99);
  int tested = 0;
  while (tested < 2000) {
    const std::size_t n = 2 + rng() % 4;
    const auto p = random_pauli(rng, n);
    const auto q = random_pauli(rng, n);
    if (!commutes(p, q)) continue;
    CnotCircuit circ;
    for (int g = 0; g < 3; ++g) {
      const std::size_t c = rng() % n;
      circ.push(c, (c + 1 + rng() % (n - 1)) % n);
    }
    PauliString lhs = multiply(p, q);
    PauliString rhs = multiply(p, q);
    for (const auto& g : circ.gates()) lhs = cnot_conjugate(lhs, g.control, g.target);
    PauliString pc = p, qc = q;
    for (const auto& g : circ.gates()) {
      pc = cnot_conjugate(pc, g.control, g.target);
      qc = cnot_conjugate(qc, g.control, g.target);
    }
    rhs = multiply(pc, qc);
    ASSERT_EQ(lhs, rhs);
    ++tested;
  }
}

TEST(Pauli, MultiplyMatchesDenseProduct) {
  std::mt19937 rng(4);
  int tested = 0;
  while (tested < 300) {
    const auto p = random_pauli(rng, 3);
    const auto q = random_pauli(rng, 3);
    if (!commutes(p, q)) {
      EXPECT_THROW(multiply(p, q), std::domain_error);
      continue;
    }
    EXPECT_LT((dense(multiply(p, q)) - dense(p) * dense(q)).norm(), 1e-12);
    ++tested;
  }
}

TEST(Pauli, BasicProperties) {
  const auto p = PauliString::x_on(5, {0, 3});
  const auto q = PauliString::z_on(5, {3, 4});
  EXPECT_TRUE(p.is_x_type());
  EXPECT_TRUE(q.is_z_type());
  EXPECT_EQ(p.weight(), 2u);
  EXPECT_FALSE(commutes(p, q));
  EXPECT_TRUE(commutes(p, PauliString::z_on(5, {0, 3})));
  EXPECT_EQ(multiply(p, p), PauliString(5));
  EXPECT_EQ(p.symplectic().to_string(), "1001000000");
  EXPECT_THROW(commutes(p, PauliString(4)), std::domain_error);
  EXPECT_THROW(cnot_conjugate(p, 1, 1), std::domain_error);
  EXPECT_THROW(cnot_conjugate(p, 1, 7), std::out_of_range);
}

TEST(Pauli, CircuitLayerSemantics) {
  CnotCircuit c({{0, 1}, {2, 3}, {0, 3}});
  EXPECT_TRUE(c.is_commuting_layer());
  CnotCircuit reversed({{0, 3}, {2, 3}, {0, 1}});
  std::mt19937 rng(8);
  for (int it = 0; it < 100; ++it) {
    const auto p = random_pauli(rng, 4);
    EXPECT_EQ(circuit_conjugate(c, p), circuit_conjugate(reversed, p));
  }
  c.push(1, 2);
  EXPECT_FALSE(c.is_commuting_layer());
  CnotCircuit dup({{2, 3}, {0, 1}, {2, 3}});
  dup.canonicalize();
  EXPECT_EQ(dup.gates(), (std::vector<Cnot>{{0, 1}, {2, 3}}));
  EXPECT_THROW(CnotCircuit({{1, 1}}), std::domain_error);
}

TEST(Pauli, ToText) {
  const QubitIndexMap q(LatticeSpec{{2, 2}, Boundary::periodic}, 1);
  EXPECT_EQ(to_text(PauliString(q.size()), q), "I");
  auto p = PauliString::x_on(q.size(), {q.index(CubeCoord{1, 0})});
  p.z().set(q.index(CubeCoord{0, 1}));
  EXPECT_EQ(to_text(p, q), "X@(1/2,0) Z@(0,1/2)");
}
