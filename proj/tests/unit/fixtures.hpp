#pragma once

#include "rtwt/model.hpp"
#include "rtwt/params.hpp"

namespace fixtures {

inline const rtwt::Seconds kSlot{114.4e-6};

inline rtwt::TrafficSpec reference_traffic() { return {1.0 / 16e-3, kSlot}; }

inline rtwt::LinkSpec reference_link(int retry_limit = 3) { return {0.1, retry_limit}; }

inline rtwt::RtwtSpec rtwt_spec(double period_s, int sp_slots) {
  rtwt::RtwtSpec r;
  r.period = rtwt::Seconds(period_s);
  r.sp_slots = sp_slots;
  return r;
}

inline rtwt::SlottedConfig layout(int n, int m, int k) {
  rtwt::SlottedConfig s;
  s.sp_slots = n;
  s.vacation_slots = m;
  s.buffer = k;
  return s;
}

}  // namespace fixtures
