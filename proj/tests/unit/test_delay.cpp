#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"

using namespace rtwt;
using namespace fixtures;

TEST_CASE("vacation slots before service") {
  CHECK(vacation_slots_before_service(2, 3, 5) == 0);
  CHECK(vacation_slots_before_service(3, 3, 5) == 0);
  CHECK(vacation_slots_before_service(4, 3, 5) == 5);
  CHECK(vacation_slots_before_service(6, 3, 5) == 5);
  CHECK(vacation_slots_before_service(7, 3, 5) == 10);
  CHECK(vacation_slots_before_service(1, 1, 7) == 0);
  CHECK(vacation_slots_before_service(2, 1, 7) == 7);
  CHECK_THROWS_AS(vacation_slots_before_service(0, 3, 5), InvalidParameter);
}

TEST_CASE("batch delay") {
  const auto s = layout(3, 5, 20);
  CHECK(batch_delay(0, 0, 1, s) == 1);
  CHECK(batch_delay(0, 3, 1, s) == 6);
  CHECK(batch_delay(3, 2, 1, s) == 9);
  // The printed variant charges one slot instead of the vacation.
  CHECK(batch_delay(3, 2, 1, s, SpillPenalty::UnitStep) == 5);
  // Fits in the remaining SP: identical under both readings.
  CHECK(batch_delay(1, 0, 2, s) == batch_delay(1, 0, 2, s, SpillPenalty::UnitStep));
  CHECK(batch_delay(1, 0, 2, s) == 3);
  // Last vacation slot: one slot to the SP, then service.
  CHECK(batch_delay(0, 7, 1, s) == 2);
  CHECK_THROWS_AS(batch_delay(20, 0, 1, s), InvalidParameter);
  CHECK_THROWS_AS(batch_delay(0, 8, 1, s), InvalidParameter);
  CHECK_THROWS_AS(batch_delay(0, 0, 0, s), InvalidParameter);
}

TEST_CASE("batch delay never exceeds the support cap") {
  for (int N : {1, 3, 4}) {
    for (int M : {0, 2, 9}) {
      const auto s = layout(N, M, 10);
      const int cap = delay_support_cap(s, 4);
      for (int k = 0; k < 10; ++k) {
        for (int n = 0; n < N + M; ++n) {
          for (int r = 1; r <= 4 && k + r <= 10; ++r) {
            const int d = batch_delay(k, n, r, s);
            CHECK(d >= k + r);
            CHECK(d <= cap);
          }
        }
      }
    }
  }
}

TEST_CASE("reference delay distribution") {
  const auto e = evaluate(reference_traffic(), reference_link(), rtwt_spec(10e-3, 3));
  CHECK(std::abs(e.pmf.total() - 1.0) <= 1e-9);
  CHECK(e.pmf.mass[0] == 0.0);
  for (double m : e.pmf.mass) {
    CHECK(m >= 0.0);
  }
  CHECK(e.report.loss_probability == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(e.report.capacity == doctest::Approx(10e-3 / (3 * 114.4e-6)).epsilon(1e-12));
  CHECK(e.report.overflow_probability < 1e-9);
}

TEST_CASE("reference percentile band") {
  const auto e = evaluate(reference_traffic(), reference_link(), rtwt_spec(10e-3, 3));
  CHECK(e.report.percentile.count() >= 8e-3);
  CHECK(e.report.percentile.count() <= 12e-3);
}

TEST_CASE("metrics of simple distributions") {
  const auto traffic = reference_traffic();
  const auto link = reference_link();
  const auto rtwt = rtwt_spec(10e-3, 3);

  DelayPmf point;
  point.mass = {0.0, 1.0};
  const auto r = metrics(point, link, traffic, rtwt);
  CHECK(r.mean_delay.count() == doctest::Approx(114.4e-6).epsilon(1e-12));
  CHECK(r.jitter.count() == 0.0);
  CHECK(r.percentile.count() == doctest::Approx(114.4e-6).epsilon(1e-12));

  DelayPmf two;
  two.mass.assign(11, 0.0);
  two.mass[1] = 0.999;
  two.mass[10] = 0.001;
  CHECK(two.quantile_slots(0.999) == 1);
  CHECK(two.quantile_slots(0.9991) == 10);
  CHECK(metrics(two, link, traffic, rtwt).percentile.count() ==
        doctest::Approx(114.4e-6).epsilon(1e-12));
}

TEST_CASE("percentile is monotone in q") {
  const auto e = evaluate(reference_traffic(), reference_link(), rtwt_spec(10e-3, 3));
  int last = 0;
  for (double q = 0.01; q < 1.0; q += 0.01) {
    const int d = e.pmf.quantile_slots(q);
    CHECK(d >= last);
    last = d;
  }
  CHECK(e.pmf.quantile_slots(0.9999) >= last);
}

TEST_CASE("evaluate error paths") {
  CHECK_THROWS_AS(evaluate(TrafficSpec{0.0, kSlot}, reference_link(), rtwt_spec(10e-3, 3)),
                  ModelError);
  CHECK_THROWS_AS(evaluate(reference_traffic(), reference_link(), rtwt_spec(1.06e-3, 3)),
                  InvalidParameter);
  // A batch of two attempts never fits a one-packet buffer at the SP end,
  // but single attempts still do, so the model is well posed.
  CHECK_NOTHROW(evaluate(reference_traffic(), reference_link(), rtwt_spec(10e-3, 3), 1));
}

TEST_CASE("more SP slots never hurt") {
  const auto n3 = evaluate(reference_traffic(), reference_link(), rtwt_spec(10e-3, 3));
  const auto n10 = evaluate(reference_traffic(), reference_link(), rtwt_spec(10e-3, 10));
  CHECK(n10.report.percentile <= n3.report.percentile);
  CHECK(n10.report.mean_delay <= n3.report.mean_delay);
}

TEST_CASE("loss does not depend on the schedule") {
  for (double T : {2e-3, 5e-3, 13e-3}) {
    for (int N : {1, 4}) {
      EvaluateOptions o;
      o.allow_discretization_error = true;
      const auto e = evaluate(reference_traffic(), reference_link(), rtwt_spec(T, N), 20, o);
      CHECK(e.report.loss_probability == packet_loss_probability(reference_link()));
    }
  }
}
