// Copyright 2026 The qemlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "qemlab/io.hpp"
#include "qemlab/pauli.hpp"

using namespace qemlab;

namespace {

// Lowest eigenvalue of the shipped Hamiltonian from numpy.linalg.eigvalsh.
constexpr double kExactEnergy = -455.15622916778443;

PauliString random_string(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 3);
  std::string s;
  for (int i = 0; i < n; ++i) s.push_back("IXYZ"[d(rng)]);
  return PauliString::parse(s);
}

PauliSum random_sum(int n, int terms, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<PauliTerm> out;
  for (int i = 0; i < terms; ++i) out.push_back({g(rng), random_string(n, rng)});
  return PauliSum(n, out);
}

double commutator_norm(const PauliSum& a, const PauliSum& b) {
  const auto A = to_dense(a).matrix();
  const auto B = to_dense(b).matrix();
  return (A * B - B * A).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(PauliString, ParseAndPrint) {
  const auto p = PauliString::parse("xY_z");
  EXPECT_EQ(p.str(), "XYIZ");
  EXPECT_EQ(p.op(0), 'X');
  EXPECT_EQ(p.weight(), 3);
  EXPECT_EQ(p.support(), (std::vector<int>{0, 1, 3}));
  EXPECT_THROW(PauliString::parse("XQ"), std::invalid_argument);
}

TEST(PauliString, CommutesExamples) {
  EXPECT_TRUE(commutes(PauliString::parse("XZI"), PauliString::parse("ZXI")));
  EXPECT_TRUE(commutes(PauliString::parse("ZIZIZIZIZIZIZIZIZIZI"),
                       PauliString::parse("IZIZIZIZIZIZIZIZIZIZ")));
  EXPECT_FALSE(commutes(PauliString::parse("XII"), PauliString::parse("ZII")));
  EXPECT_THROW(commutes(PauliString::parse("XI"), PauliString::parse("XII")),
               std::invalid_argument);
}

TEST(PauliString, CommutesIsSymmetricAndMatchesDense) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_string(4, rng);
    const auto b = random_string(4, rng);
    ASSERT_EQ(commutes(a, b), commutes(b, a));
    const auto A = to_dense(a).matrix();
    const auto B = to_dense(b).matrix();
    ASSERT_EQ(commutes(a, b), (A * B - B * A).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST(PauliString, ProductMatchesDense) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_string(3, rng);
    const auto b = random_string(3, rng);
    const auto prod = multiply(a, b);
    const Eigen::MatrixXcd expected = to_dense(a).matrix() * to_dense(b).matrix();
    const Eigen::MatrixXcd got = prod.phase() * to_dense(prod.string).matrix();
    ASSERT_LT((expected - got).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PauliSum, MergesDuplicates) {
  const auto s = PauliSum::from_pairs(2, {{"ZI", 1.0}, {"XX", 0.5}, {"ZI", 2.0}});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.terms()[0].string.str(), "ZI");
  EXPECT_DOUBLE_EQ(s.terms()[0].coeff, 3.0);
}

TEST(PauliSum, DenseBasics) {
  const auto id = to_dense(PauliSum::from_pairs(2, {{"II", 2.5}})).matrix();
  EXPECT_LT((id - 2.5 * Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
  const auto z = to_dense(PauliString::parse("Z")).matrix();
  EXPECT_EQ(z(0, 0), Complex(1.0));
  EXPECT_EQ(z(1, 1), Complex(-1.0));
}

TEST(PauliSum, HamiltonianGroundEnergy) {
  const auto h = load_hcl_hamiltonian();
  EXPECT_EQ(h.size(), 34u);
  EXPECT_DOUBLE_EQ(h.identity_coeff(), -453.090742);
  EXPECT_LT(to_dense(h).hermiticity_error(), 1e-12);
  const auto gs = ground_state(h);
  EXPECT_NEAR(gs.energy, kExactEnergy, 1e-9);
  EXPECT_LE(std::abs(gs.energy - (-455.157)), 0.837e-3 + 0.5e-3);
  EXPECT_NEAR(expectation(h, gs.state), gs.energy, 1e-9);
}

TEST(PauliSum, TrivialGroundStates) {
  const auto c = ground_state(PauliSum::from_pairs(2, {{"II", -1.25}}));
  EXPECT_NEAR(c.energy, -1.25, 1e-12);
  const auto z = ground_state(PauliSum::from_pairs(1, {{"Z", 1.0}}));
  EXPECT_NEAR(z.energy, -1.0, 1e-12);
  EXPECT_NEAR(std::abs(z.state(1)), 1.0, 1e-12);
}

TEST(PauliSum, VariationalBound) {
  const auto h = load_hcl_hamiltonian();
  const double e0 = ground_state(h).energy;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    StateVector v(8);
    for (int i = 0; i < 8; ++i) v(i) = Complex(g(rng), g(rng));
    v.normalize();
    ASSERT_GE(expectation(h, v), e0 - 1e-9);
  }
}

TEST(PauliSum, ExpectationGuards) {
  StateVector zero = StateVector::Zero(2);
  zero(0) = 1.0;
  EXPECT_DOUBLE_EQ(expectation(PauliString::parse("Z"), zero), 1.0);
  EXPECT_DOUBLE_EQ(expectation(PauliString::parse("X"), zero), 0.0);
  StateVector unnormalized = 2.0 * zero;
  EXPECT_THROW(expectation(PauliString::parse("Z"), unnormalized), std::invalid_argument);
  EXPECT_THROW(expectation(PauliString::parse("ZZ"), zero), std::invalid_argument);
}

TEST(Symmetry, TaperingGeneratorsCommute) {
  const auto j = read_json_file(data_file("hcl_tapering_generators.json"));
  std::vector<PauliString> gens;
  for (const auto& [name, s] : j.at("generators").items()) {
    gens.push_back(PauliString::parse(s.get<std::string>()));
  }
  ASSERT_EQ(gens.size(), 4u);
  for (const auto& a : gens) {
    for (const auto& b : gens) EXPECT_TRUE(commutes(a, b));
  }
}

TEST(Symmetry, ReducedOperatorsCommuteWithHamiltonian) {
  const auto h = load_hcl_hamiltonian();
  const auto j = read_json_file(data_file("hcl_3q_symmetries.json"));
  for (const auto& op : j.at("operators")) {
    const auto s = pauli_sum_from_json({{"n_qubits", 3}, {"terms", op.at("terms")}});
    EXPECT_TRUE(commutes_with_sum(s, h)) << op.at("name");
    EXPECT_LT(commutator_norm(s, h), 1e-10);
  }
  const auto iiz = PauliSum::from_pairs(3, {{"IIZ", 1.0}});
  EXPECT_FALSE(commutes_with_sum(iiz, h));
  EXPECT_GT(commutator_norm(iiz, h), 1e-3);
}

TEST(Symmetry, SzDoesNotCommuteWithEveryTerm) {
  const auto h = load_hcl_hamiltonian();
  const auto sz = PauliSum::from_pairs(3, {{"IZI", 0.25}, {"IZZ", 0.25}, {"ZII", -0.25}, {"ZIZ", -0.25}});
  bool some_fail = false;
  for (const auto& t : h.terms()) {
    some_fail |= !commutes_with_sum(sz, PauliSum(3, {t}));
  }
  EXPECT_TRUE(some_fail);
}

TEST(PauliSum, CommutesWithSumAgreesWithDense) {
  std::mt19937_64 rng(5);
  int agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    auto a = random_sum(n, 1 + trial % 3, rng);
    // Half the cases use a sum that commutes by construction.
    const auto b = trial % 2 ? random_sum(n, 2, rng) : a;
    const bool dense = commutator_norm(a, b) < 1e-10;
    agree += commutes_with_sum(a, b) == dense;
  }
  EXPECT_EQ(agree, 200);
}
