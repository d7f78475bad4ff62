#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "gssh/edge_state.hpp"
#include "gssh/errors.hpp"
#include "gssh/lattice.hpp"

using namespace gssh;
using doctest::Approx;

namespace {

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> near_zero_pair(const ChainHamiltonian& h) {
  const auto es = eigensystem(h);
  const Eigen::Index mid = es.energies.size() / 2;
  return {es.states.col(mid - 1), es.states.col(mid)};
}

double weight_at(const Eigen::VectorXcd& psi, Sublattice s, std::size_t cell) {
  return std::norm(psi(static_cast<Eigen::Index>(site_index(s, cell))));
}

}  // namespace

TEST_CASE("edge kind names round trip") {
  for (EdgeKind k : {EdgeKind::LC, EdgeKind::LM, EdgeKind::RC, EdgeKind::RM, EdgeKind::HybridLCRM,
                     EdgeKind::HybridLMRC, EdgeKind::Bulk})
    CHECK(parse_edge_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_edge_kind("XY"), ConfigError);
  CHECK(edge_sublattice(EdgeKind::RM) == Sublattice::Mechanical);
  CHECK(edge_side(EdgeKind::RM) == Side::Right);
  CHECK(edge_side(EdgeKind::LC) == Side::Left);
  CHECK_FALSE(is_single_edge(EdgeKind::HybridLCRM));
}

TEST_CASE("profile fit recovers the localization length") {
  for (double xi : {0.5, 1.0, 2.5}) {
    for (Side side : {Side::Left, Side::Right}) {
      const Eigen::VectorXd prof = edge_profile(10, xi, side);
      CHECK(prof.sum() == Approx(1.0));
      const std::vector<double> probs(prof.data(), prof.data() + prof.size());
      const ProfileFit fit = fit_edge_profile(probs, side);
      CHECK(fit.xi == Approx(xi).epsilon(1e-10));
      CHECK(fit.r2 == Approx(1.0));
      CHECK(fit.localized);
      if (side == Side::Left) CHECK(prof(0) > prof(9));
      else CHECK(prof(9) > prof(0));
    }
  }
  // Growing away from the edge is not an edge profile.
  const Eigen::VectorXd prof = edge_profile(10, 1.0, Side::Right);
  const std::vector<double> probs(prof.data(), prof.data() + prof.size());
  CHECK_FALSE(fit_edge_profile(probs, Side::Left).localized);
}

TEST_CASE("single-edge ansatz states classify as themselves") {
  for (EdgeKind k : {EdgeKind::LC, EdgeKind::LM, EdgeKind::RC, EdgeKind::RM}) {
    CAPTURE(to_string(k));
    const Eigen::VectorXcd psi = edge_ansatz(k, 8, 1.3);
    CHECK(psi.norm() == Approx(1.0));
    const EdgeStateLabel l = classify_edge_state(psi);
    CHECK(l.kind == k);
    REQUIRE(l.xi.has_value());
    CHECK(*l.xi == Approx(1.3).epsilon(1e-9));
    CHECK(l.fit_quality == Approx(1.0));
    CHECK(l.captured == Approx(1.0));
  }
}

TEST_CASE("an injected end site is an infinitely sharp edge state") {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
  psi(0) = 1.0;
  const EdgeStateLabel l = classify_edge_state(psi);
  CHECK(l.kind == EdgeKind::LC);
  REQUIRE(l.xi.has_value());
  CHECK(*l.xi < 0.1);
  psi.setZero();
  psi(15) = 1.0;
  CHECK(classify_edge_state(psi).kind == EdgeKind::RM);
}

TEST_CASE("hybrid superpositions") {
  const Eigen::VectorXcd lc = edge_ansatz(EdgeKind::LC, 8, 1.2), rm = edge_ansatz(EdgeKind::RM, 8, 1.2);
  const Eigen::VectorXcd lm = edge_ansatz(EdgeKind::LM, 8, 0.9), rc = edge_ansatz(EdgeKind::RC, 8, 0.9);
  CHECK(classify_edge_state((lc + rm) / std::sqrt(2.0)).kind == EdgeKind::HybridLCRM);
  CHECK(classify_edge_state((lc - rm) / std::sqrt(2.0)).kind == EdgeKind::HybridLCRM);
  CHECK(classify_edge_state((lm + cplx(0, 1) * rc) / std::sqrt(2.0)).kind == EdgeKind::HybridLMRC);
  // Same-side mixtures fit neither pair.
  CHECK(classify_edge_state((lc + lm) / std::sqrt(2.0)).kind == EdgeKind::Bulk);
}

TEST_CASE("uniform state is bulk") {
  const Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(16, 1.0 / 4.0);
  const EdgeStateLabel l = classify_edge_state(psi);
  CHECK(l.kind == EdgeKind::Bulk);
  CHECK_FALSE(l.xi.has_value());
  CHECK(l.cavity_weight == Approx(0.5));
}

TEST_CASE("near-zero chain eigenstates are hybridized edge states") {
  SUBCASE("v >> z pairs LC with RM") {
    const auto [lo, hi] = near_zero_pair(build_chain(8, Boundary::Open, {0.1, 0.0, 1.0, 0.1}));
    for (const auto& psi : {lo, hi}) {
      const EdgeStateLabel l = classify_edge_state(psi);
      CHECK(l.kind == EdgeKind::HybridLCRM);
      CHECK(l.fit_quality >= 0.95);
      REQUIRE(l.xi.has_value());
      CHECK(weight_at(psi, Sublattice::Cavity, 1) > weight_at(psi, Sublattice::Cavity, 8));
      CHECK(weight_at(psi, Sublattice::Mechanical, 8) > weight_at(psi, Sublattice::Mechanical, 1));
    }
  }
  SUBCASE("z >> v pairs LM with RC") {
    const auto [lo, hi] = near_zero_pair(build_chain(8, Boundary::Open, {1.0, 0.0, 1.0, 10.0}));
    for (const auto& psi : {lo, hi}) {
      const EdgeStateLabel l = classify_edge_state(psi);
      CHECK(l.kind == EdgeKind::HybridLMRC);
      CHECK(l.fit_quality >= 0.95);
      CHECK(weight_at(psi, Sublattice::Mechanical, 1) > weight_at(psi, Sublattice::Mechanical, 8));
      CHECK(weight_at(psi, Sublattice::Cavity, 8) > weight_at(psi, Sublattice::Cavity, 1));
    }
  }
}

TEST_CASE("localization length present exactly for edge labels") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto es = eigensystem(build_chain(6 + trial % 5, Boundary::Open, {u(rng), 0.0, u(rng), u(rng)}));
    for (Eigen::Index i = 0; i < es.states.cols(); ++i) {
      const EdgeStateLabel l = classify_edge_state(es.states.col(i));
      CHECK(l.xi.has_value() == (l.kind != EdgeKind::Bulk));
      CHECK(l.fit_quality >= 0.0);
      CHECK(l.fit_quality <= 1.0);
      if (l.xi) CHECK(*l.xi > 0.0);
    }
  }
}

TEST_CASE("classification input checks") {
  CHECK_THROWS_AS(classify_edge_state(Eigen::VectorXcd::Ones(5)), DimensionMismatch);
  CHECK_THROWS_AS(classify_edge_state(Eigen::VectorXcd::Zero(4)), ConfigError);
  CHECK_THROWS_AS(edge_ansatz(EdgeKind::Bulk, 4, 1.0), ConfigError);
}
