#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include "sep/experiments.hpp"
#include "sep/parallel.hpp"

using namespace sep;

TEST_CASE("SEP_THREADS caps the worker count") {
  setenv("SEP_THREADS", "1", 1);
  REQUIRE(worker_count(8) == 1);
  setenv("SEP_THREADS", "3", 1);
  REQUIRE(worker_count(8) == 3);
  REQUIRE(worker_count(2) == 2);  // never more workers than jobs
  unsetenv("SEP_THREADS");
  REQUIRE(worker_count(4) >= 1);
}

TEST_CASE("recovery setup calibrates the field second moment exactly") {
  const auto setup = make_recovery_setup(32, 32, 5);
  const Grid lx = apply_operator(setup.model.regularizer, setup.truth);
  REQUIRE(mean_square(lx) == Catch::Approx(setup.target_field_var).margin(1e-12));
  REQUIRE(setup.truth.all_finite());

  // The cylinder dominates the texture visually.
  const Grid disk = make_phantom(PhantomSpec::cylinder(32, 32, 1.0));
  double inside = 0.0, outside = 0.0;
  std::size_t n_in = 0, n_out = 0;
  for (std::size_t k = 0; k < disk.size(); ++k) {
    if (disk[k] > 0.0) {
      inside += setup.truth[k];
      ++n_in;
    } else {
      outside += setup.truth[k];
      ++n_out;
    }
  }
  REQUIRE(inside / n_in > 5.0 * std::abs(outside / n_out));

  // Determinism of the generator.
  const auto again = make_recovery_setup(32, 32, 5);
  REQUIRE(setup.truth.values() == again.truth.values());
  REQUIRE(setup.observation.values() == again.observation.values());
}

TEST_CASE("desk-scale recovery lands near the generative values (small grid smoke)") {
  // Full-tolerance checks live in the acceptance suite at 64x64; this guards
  // the machinery at 24x24 with wider bands.
  const auto setup = make_recovery_setup(24, 24, 9);
  const auto est = recover_with_epmc(setup, 17, /*sweeps=*/160, /*rate_samples=*/2048,
                                     /*x_samples=*/192);
  REQUIRE(est.precision > 60.0);
  REQUIRE(est.precision < 160.0);
  REQUIRE(est.sd > 0.07);
  REQUIRE(est.sd < 0.14);

  const auto mcmc = recover_with_epmcmc(setup, 17, /*iters=*/400, /*replications=*/4);
  REQUIRE(mcmc.precision > 60.0);
  REQUIRE(mcmc.precision < 160.0);
  REQUIRE(mcmc.sd > 0.07);
  REQUIRE(mcmc.sd < 0.14);
}

TEST_CASE("improvement experiment beats the observation on both phantoms") {
  for (const auto kind : {PhantomKind::Cylinder, PhantomKind::FourCircles}) {
    const auto res = improvement_experiment(kind, 32, 32, 0.25, 13);
    REQUIRE(res.reconstruction_error < res.observation_error);
    REQUIRE(res.min_variance > 0.0);
    REQUIRE(res.collapses == 0);
  }
}
