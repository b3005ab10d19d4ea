#include <doctest.h>

#include <cmath>

#include "rtwt/params.hpp"

using namespace rtwt;

namespace {

const Seconds kSlot{114.4e-6};

TrafficSpec reference_traffic() { return {1.0 / 16e-3, kSlot}; }

RtwtSpec rtwt_spec(double period_s, int sp_slots) {
  RtwtSpec r;
  r.period = Seconds(period_s);
  r.sp_slots = sp_slots;
  return r;
}

}  // namespace

TEST_CASE("slotify rounds the period to whole slots") {
  const auto s = slotify(reference_traffic(), rtwt_spec(10e-3, 3), 20);
  CHECK(s.sp_slots == 3);
  CHECK(s.vacation_slots == 84);
  CHECK(s.buffer == 20);
  CHECK(s.cycle_len() == 87);
  CHECK(s.discretization_error == doctest::Approx(std::abs(10e-3 - 87 * 114.4e-6) / 10e-3));
  CHECK(s.discretization_error == doctest::Approx(0.0047).epsilon(0.01));

  const auto s16 = slotify(reference_traffic(), rtwt_spec(16e-3, 3), 20);
  CHECK(s16.vacation_slots == 137);
}

TEST_CASE("slotify on an exact slot multiple") {
  const TrafficSpec t{10.0, Seconds(1e-3)};
  const auto s = slotify(t, rtwt_spec(8e-3, 3), 4);
  CHECK(s.vacation_slots == 5);
  CHECK(s.discretization_error == 0.0);

  // Re-slotting the period implied by the result changes nothing.
  const auto again = slotify(t, rtwt_spec(s.cycle_len() * 1e-3, s.sp_slots), 4);
  CHECK(again.vacation_slots == s.vacation_slots);
  CHECK(again.discretization_error == s.discretization_error);
}

TEST_CASE("slotify rejects bad layouts") {
  const TrafficSpec t{10.0, Seconds(1e-3)};
  CHECK_THROWS_AS(slotify(t, rtwt_spec(2e-3, 3), 4), InvalidParameter);
  CHECK_THROWS_AS(slotify(t, rtwt_spec(8e-3, 3), 0), InvalidParameter);
  // 8.3 slots: 3.6% off.
  CHECK_THROWS_AS(slotify(t, rtwt_spec(8.3e-3, 3), 4), InvalidParameter);
  const auto s = slotify(t, rtwt_spec(8.3e-3, 3), 4, SlotifyOptions{true});
  CHECK(s.vacation_slots == 5);
  CHECK(s.discretization_error > 0.01);
}

TEST_CASE("batch distribution for the reference scenario") {
  const auto b = batch_distribution(reference_traffic(), LinkSpec{0.1, 3});
  REQUIRE(b.retry_limit() == 3);
  CHECK(b.b == doctest::Approx(7.1245e-3).epsilon(1e-4));
  CHECK(b.b_success[1] == doctest::Approx(6.4121e-3).epsilon(1e-4));
  CHECK(b.b_fail == doctest::Approx(7.1245e-6).epsilon(1e-4));
  CHECK(b.b_hat[1] == b.b_success[1]);
  CHECK(b.b_hat[2] == b.b_success[2]);
  CHECK(b.b_hat[3] == doctest::Approx(b.b_success[3] + b.b_fail).epsilon(1e-15));
}

TEST_CASE("batch distribution degenerate cases") {
  SUBCASE("no arrivals") {
    const auto b = batch_distribution(TrafficSpec{0.0, kSlot}, LinkSpec{0.1, 3});
    CHECK(b.b0 == 1.0);
    CHECK(b.b == 0.0);
    CHECK(b.b_fail == 0.0);
    for (int r = 1; r <= 3; ++r) {
      CHECK(b.b_success[r] == 0.0);
      CHECK(b.b_hat[r] == 0.0);
    }
  }
  SUBCASE("error-free link") {
    const auto b = batch_distribution(reference_traffic(), LinkSpec{0.0, 3});
    CHECK(b.b_success[1] == b.b);
    CHECK(b.b_success[2] == 0.0);
    CHECK(b.b_success[3] == 0.0);
    CHECK(b.b_fail == 0.0);
  }
  SUBCASE("link always fails") {
    const auto b = batch_distribution(reference_traffic(), LinkSpec{1.0, 2});
    CHECK(b.b_success[1] == 0.0);
    CHECK(b.b_success[2] == 0.0);
    CHECK(b.b_fail == b.b);
    CHECK(b.b_hat[2] == b.b);
  }
}

TEST_CASE("batch distribution closes for a range of inputs") {
  for (double rate : {0.0, 1.0, 62.5, 500.0, 5000.0}) {
    for (double p : {0.0, 0.05, 0.1, 0.5, 0.9, 1.0}) {
      for (int R = 1; R <= 7; ++R) {
        CAPTURE(rate);
        CAPTURE(p);
        CAPTURE(R);
        const auto b = batch_distribution(TrafficSpec{rate, kSlot}, LinkSpec{p, R});
        CHECK(std::abs(b.b0 + b.b - 1.0) <= 1e-12);
        double hat = b.b0;
        double success = b.b_fail;
        for (int r = 1; r <= R; ++r) {
          hat += b.b_hat[r];
          success += b.b_success[r];
          CHECK(b.b_hat[r] >= 0.0);
          CHECK(b.b_hat[r] <= 1.0);
        }
        CHECK(std::abs(hat - 1.0) <= 1e-12);
        CHECK(std::abs(success - b.b) <= 1e-12);
      }
    }
  }
}

TEST_CASE("packet loss probability") {
  CHECK(packet_loss_probability(LinkSpec{0.1, 3}) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(packet_loss_probability(LinkSpec{0.1, 1}) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(packet_loss_probability(LinkSpec{0.0, 3}) == 0.0);

  for (double p = 0.0; p <= 1.0; p += 0.05) {
    for (int R = 1; R < 8; ++R) {
      CHECK(packet_loss_probability(LinkSpec{p, R + 1}) <= packet_loss_probability(LinkSpec{p, R}));
      if (p + 0.05 <= 1.0) {
        CHECK(packet_loss_probability(LinkSpec{p + 0.05, R}) >=
              packet_loss_probability(LinkSpec{p, R}));
      }
    }
  }
}

TEST_CASE("system capacity") {
  CHECK(system_capacity(rtwt_spec(4e-3, 1), reference_traffic()) ==
        doctest::Approx(34.965).epsilon(1e-4));
  CHECK(system_capacity(rtwt_spec(10e-3, 5), reference_traffic()) ==
        doctest::Approx(17.483).epsilon(1e-4));
  CHECK(system_capacity(rtwt_spec(3 * 114.4e-6, 3), reference_traffic()) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((TrafficSpec{-1.0, kSlot}.validate()), InvalidParameter);
  CHECK_THROWS_AS((TrafficSpec{1.0, Seconds(0.0)}.validate()), InvalidParameter);
  CHECK_THROWS_AS((LinkSpec{1.5, 3}.validate()), InvalidParameter);
  CHECK_THROWS_AS((LinkSpec{0.1, 0}.validate()), InvalidParameter);
  CHECK_THROWS_AS(rtwt_spec(0.0, 1).validate(), InvalidParameter);
  CHECK_THROWS_AS(rtwt_spec(1e-3, 0).validate(), InvalidParameter);
  CHECK_THROWS_AS(rtwt_spec(0.2e-3, 3).validate_against(reference_traffic()), InvalidParameter);
  CHECK(reference_traffic().short_slot_assumption_holds());
  CHECK_FALSE((TrafficSpec{2000.0, kSlot}.short_slot_assumption_holds()));
}
