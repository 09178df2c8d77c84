#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "fpcons/admissibility.hpp"
#include "fpcons/errors.hpp"
#include "oracles.hpp"

using namespace fpcons;

namespace {

const LameParameters kLame{2.0, 1.0};

ProbeOptions probe_opts(std::size_t count = 100) {
  ProbeOptions o;
  o.count = count;
  o.det_min = 0.5;
  o.det_max = 2.0;
  return o;
}

std::vector<State> probes(std::size_t count = 100) { return make_probes(probe_opts(count)); }

}  // namespace

TEST(Probes, DeterministicAndInRange) {
  auto a = probes(), b = probes();
  ASSERT_EQ(a.size(), 100u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].F, b[i].F);
    EXPECT_EQ(a[i].p, b[i].p);
    double d = det(a[i].F);
    EXPECT_GE(d, 0.5);
    EXPECT_LE(d, 2.0);
    EXPECT_LE(norm(a[i].p), 3.0);
  }
  EXPECT_EQ(norm(a[0].p), 0.0);
}

TEST(Normality, HandValues) {
  auto ps = probes(20);
  Check c = check_normality(classical_model(2.0, neo_hookean(kLame)), ps);
  EXPECT_TRUE(c.ok);
  EXPECT_NEAR(c.value, 0.125, 1e-9);
  Check t = check_normality(tensor_mass_model(Ten2::diag(1, 2, 3), linear_isotropic(kLame)), ps);
  EXPECT_NEAR(t.value, 6.0, 1e-8);
  Check bad = check_normality(negative_control(Violation::normality, linear_isotropic(kLame)), ps);
  EXPECT_FALSE(bad.ok);
  EXPECT_LT(bad.value, 1e-8);
}

TEST(Ellipticity, IsotropicDeterminant) {
  ConstitutiveModel m = classical_model(1.0, linear_isotropic(kLame));
  auto ep = make_ellipticity_probes(m, probes(30), 5);
  Check c = check_ellipticity(m, ep);
  EXPECT_TRUE(c.ok);
  EXPECT_NEAR(c.value, 4.0, 1e-6);
  for (const auto& e : ep) {
    Ten2 E = ellipticity_matrix(m, e.F, e.v, e.a, e.p_seed);
    EXPECT_LT(max_abs(E - oracle::isotropic_acoustic(kLame.lambda, kLame.mu, e.a)), 1e-6);
  }
  ConstitutiveModel zero = negative_control(Violation::ellipticity, linear_isotropic(kLame));
  EXPECT_FALSE(check_ellipticity(zero, make_ellipticity_probes(zero, probes(10), 5)).ok);
}

TEST(Ellipticity, RejectsNonUnitDirection) {
  ConstitutiveModel m = classical_model(1.0, linear_isotropic(kLame));
  std::vector<EllipticityProbe> ep{{Ten2::identity(), Vec3{}, Vec3{{2, 0, 0}}, Vec3{}}};
  EXPECT_THROW(check_ellipticity(m, ep), NotUnit);
}

TEST(Thermo, ConstructedModelsPass) {
  auto ps = probes();
  for (const StoredEnergy& se : stored_energy_registry(kLame)) {
    ThermoResult r1 = check_thermo(classical_model(1.5, se), ps);
    EXPECT_TRUE(r1.check.ok) << se.name << " " << r1.check.value;
    EXPECT_LE(r1.check.value, 1e-6);
    ThermoResult r2 = check_thermo(tensor_mass_model(Ten2::diag(1, 2, 3), se), ps);
    EXPECT_LE(r2.check.value, 1e-6) << se.name;
  }
  ThermoResult q = check_thermo(classical_model(1.0, linear_isotropic(kLame)), ps);
  EXPECT_LE(q.check.value, 1e-8);
}

TEST(Thermo, ScaledStressFailsWithViolatingDirection) {
  StoredEnergy se = neo_hookean(kLame);
  auto ps = probes();
  ThermoResult r = check_thermo(negative_control(Violation::thermo, se), ps);
  EXPECT_FALSE(r.check.ok);
  EXPECT_GT(r.check.value, 0.01);
  // The F residual is one tenth of the stress at the worst probe.
  const State& s = ps[r.worst_probe];
  EXPECT_NEAR(r.residual_F, 0.1 * norm(se.stress(s.F)), 1e-5 * std::max(1.0, norm(se.stress(s.F))));
  EXPECT_GT(r.dissipation_excess, 0.0);
}

TEST(Maxwell, TensorAndClassicalVanish) {
  auto ps = probes(30);
  EXPECT_LE(check_maxwell(tensor_mass_model(Ten2::diag(1, 2, 3), neo_hookean(kLame)), ps).value, 1e-8);
  EXPECT_LE(check_maxwell(classical_model(2.0, st_venant_kirchhoff(kLame)), ps).value, 1e-8);
}

TEST(Maxwell, CoupledModelSymmetric) {
  // tau = sigma + |p|^2/2 + p·F e1: dS/dp and dv/dF are the same constant array.
  StoredEnergy se = linear_isotropic(kLame);
  ConstitutiveModel m;
  m.name = "coupled";
  m.energy = [se](const State& s) { return se.sigma(s.F) + 0.5 * dot(s.p, s.p) + dot(s.p, column(s.F, 0)); };
  m.velocity = [](const State& s) { return s.p + column(s.F, 0); };
  m.stress = [se](const State& s) { return se.stress(s.F) + outer(s.p, Vec3::basis(0)); };
  auto ps = probes(30);
  EXPECT_LE(check_maxwell(m, ps).value, 1e-6);
  EXPECT_LE(check_thermo(m, ps).check.value, 1e-6);
}

TEST(Galilean, Cases) {
  auto ps = probes(30);
  ConstitutiveModel t = tensor_mass_model(Ten2::diag(1, 2, 3), linear_isotropic(kLame));
  EXPECT_LE(check_galilean(t, ps, default_shifts(3)).value, 1e-9);
  EXPECT_EQ(check_galilean(negative_control(Violation::galilean, linear_isotropic(kLame)), ps, {Vec3{}}).value, 0.0);
  EXPECT_FALSE(check_galilean(negative_control(Violation::galilean, linear_isotropic(kLame)), ps, default_shifts(3)).ok);
}

TEST(Parity, Cases) {
  auto ps = probes(30);
  EXPECT_EQ(check_parity(tensor_mass_model(Ten2::diag(1, 2, 3), neo_hookean(kLame)), ps).value, 0.0);
  ConstitutiveModel bad = negative_control(Violation::parity, neo_hookean(kLame));
  Check c = check_parity(bad, ps);
  EXPECT_FALSE(c.ok);
  double expected = 0.0;
  for (const State& s : ps) expected = std::max(expected, 2.0 * std::abs(s.p[0]));
  EXPECT_NEAR(c.value, expected, 1e-12);
  std::vector<State> rest{State{Ten2::diag(1.1, 1, 1), {}}};
  EXPECT_EQ(check_parity(bad, rest).value, 0.0);
}

TEST(Assess, ConstructedModelsPassEverything) {
  for (const StoredEnergy& se : stored_energy_registry(kLame)) {
    for (const ConstitutiveModel& m : {classical_model(1.0, se), tensor_mass_model(Ten2::diag(1, 2, 3), se)}) {
      AdmissibilityReport r = assess(m, probe_opts());
      EXPECT_TRUE(r.all_ok()) << m.name;
      for (const Check& c : r.checks())
        if (c.sense == Check::Sense::at_most) EXPECT_LE(c.value, 1e-6) << m.name << " " << c.name;
    }
  }
}

TEST(Assess, NegativeControlsFailTheirTargets) {
  const std::map<Violation, std::vector<std::string>> expected_failures{
      {Violation::normality, {"normality", "galilean"}},
      {Violation::ellipticity, {"ellipticity"}},
      {Violation::thermo, {"thermo"}},
      {Violation::maxwell, {"thermo", "maxwell"}},
      {Violation::galilean, {"galilean"}},
      {Violation::parity, {"parity"}},
  };
  for (Violation v : all_violations()) {
    AdmissibilityReport r = assess(negative_control(v, neo_hookean(kLame)), probe_opts());
    std::vector<std::string> failed;
    for (const Check& c : r.checks())
      if (!c.ok) failed.push_back(c.name);
    std::sort(failed.begin(), failed.end());
    auto want = expected_failures.at(v);
    std::sort(want.begin(), want.end());
    EXPECT_EQ(failed, want) << to_string(v);
  }
}

TEST(Assess, ReportSerialization) {
  AdmissibilityReport r = assess(classical_model(1.0, linear_isotropic(kLame)), probe_opts(10));
  std::ostringstream kv, csv;
  write_key_value(kv, r);
  write_csv(csv, r);
  EXPECT_NE(kv.str().find("normality"), std::string::npos);
  const std::string text = csv.str();
  EXPECT_EQ(text.rfind("check,value,tolerance,sense,pass\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
}

TEST(Violations, NameRoundTrip) {
  for (Violation v : all_violations()) EXPECT_EQ(violation_from_string(to_string(v)), v);
  EXPECT_FALSE(violation_from_string("bogus").has_value());
}

TEST(Representation, RecoversDiagonalV) {
  RepresentationResult r =
      extract_representation(tensor_mass_model(Ten2::diag(1, 2, 3), neo_hookean(kLame)), probes());
  EXPECT_LE(max_abs(r.V_fit - Ten2::diag(1, 2, 3)), 1e-8);
  EXPECT_LE(r.linearity_residual, 1e-8);
  EXPECT_LE(r.symmetry_residual, 1e-9);
  EXPECT_LE(r.split_residual, 1e-6);
  EXPECT_LT(max_abs(r.V_fit * r.M_fit - Ten2::identity()), 1e-10);
  Ten2 F = Ten2::diag(1.2, 0.9, 1.0);
  EXPECT_NEAR(r.sigma_fit(F), neo_hookean(kLame).sigma(F), 1e-12);
}

TEST(Representation, ClassicalGivesInverseDensity) {
  RepresentationResult r = extract_representation(classical_model(4.0, linear_isotropic(kLame)), probes());
  EXPECT_LE(max_abs(r.V_fit - 0.25 * Ten2::identity()), 1e-10);
  EXPECT_TRUE(r.ok());
}

TEST(Representation, TwentyRandomV) {
  oracle::Rng rng(41);
  auto ps = probes();
  for (int trial = 0; trial < 20; ++trial) {
    Ten2 V = rng.spd(0.2, 5.0);
    RepresentationResult r = extract_representation(tensor_mass_model(V, st_venant_kirchhoff(kLame)), ps);
    EXPECT_LE(max_abs(r.V_fit - V), 1e-8);
    EXPECT_LE(r.split_residual, 1e-6);
    EXPECT_LE(r.symmetry_residual, 1e-9);
  }
}

TEST(Representation, GuardsPreconditions) {
  EXPECT_THROW(extract_representation(negative_control(Violation::parity, linear_isotropic(kLame)), probes()),
               PreconditionFailed);
  EXPECT_THROW(extract_representation(negative_control(Violation::normality, linear_isotropic(kLame)), probes()),
               PreconditionFailed);
  EXPECT_THROW(extract_representation(classical_model(1.0, linear_isotropic(kLame)), probes(2)), FitDegenerate);
}

TEST(InitialRates, TensorModelCases) {
  ConstitutiveModel m = tensor_mass_model(Ten2::diag(1, 2, 3), neo_hookean(kLame));
  oracle::Rng rng(42);
  Ten2 A = rng.deformation();
  Ten2 B = rng.ten2();
  Vec3 a = rng.unit(), c = rng.vec();
  InitialRates r0 = initial_rate_check(m, A, B, a, Vec3{}, c);
  EXPECT_LT(max_abs(r0.p_rate), 1e-7);
  EXPECT_EQ(r0.F_rate, B);

  Vec3 b = rng.vec();
  InitialRates r1 = initial_rate_check(m, A, Ten2{}, a, b, c);
  EXPECT_EQ(max_abs(r1.F_rate), 0.0);
  EXPECT_LT(max_abs(r1.p_rate - r1.ellipticity * b), 1e-12);
  // E(A, c; a) is the acoustic tensor of the stored energy at A.
  Ten2 E = oracle::acoustic_loops(neo_hookean(kLame).elasticity(A), a);
  EXPECT_LT(max_abs(r1.ellipticity - E), 1e-6 * std::max(1.0, max_abs(E)));
  EXPECT_THROW(initial_rate_check(m, A, B, 2.0 * a, b, c), NotUnit);
}

TEST(InitialRates, SurjectivityRoundTrip) {
  oracle::Rng rng(43);
  for (const ConstitutiveModel& m : {classical_model(1.3, neo_hookean(kLame)),
                                     tensor_mass_model(rng.spd(0.2, 5.0), st_venant_kirchhoff(kLame))}) {
    for (int trial = 0; trial < 10; ++trial) {
      Ten2 A = rng.deformation(0.8, 1.25), B = rng.ten2();
      Vec3 a = rng.unit(), c = rng.vec(), b = rng.vec();
      Vec3 target = initial_rate_check(m, A, B, a, b, c).p_rate;
      Vec3 back = solve_rate_amplitude(m, A, B, a, c, target);
      EXPECT_LT(max_abs(back - b), 1e-8) << m.name;
    }
  }
  ConstitutiveModel zero = negative_control(Violation::ellipticity, linear_isotropic(kLame));
  EXPECT_THROW(initial_rate_check(zero, Ten2::identity(), Ten2{}, Vec3::basis(0), Vec3{}, Vec3{}),
               PreconditionFailed);
}
