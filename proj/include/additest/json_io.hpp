#pragma once

#include <json.hpp>

#include "additest/rptest.hpp"
#include "additest/simlab.hpp"

namespace additest {

inline void to_json(nlohmann::json& j, const TestReport& r) {
  j = nlohmann::json{{"statistic", r.statistic},
                     {"df", r.df},
                     {"p_value", r.p_value},
                     {"alpha", r.alpha},
                     {"reject", r.reject},
                     {"kind", r.kind},
                     {"smallest_pivot", r.smallest_pivot}};
}

inline void to_json(nlohmann::json& j, const ProjectionReport& r) {
  j = nlohmann::json{{"theta_bar", r.theta_bar},
                     {"u_alpha", r.u_alpha},
                     {"reject", r.reject},
                     {"r", r.r},
                     {"M", r.num_projections},
                     {"alpha", r.alpha},
                     {"redraws", r.redraws},
                     {"theta", r.theta}};
}

inline void to_json(nlohmann::json& j, const RepRecord& r) {
  j = nlohmann::json{{"p_value", r.p_value}, {"reject", r.reject}};
  if (std::isnan(r.statistic)) {
    j["statistic"] = nullptr;
  } else {
    j["statistic"] = r.statistic;
  }
}

inline void to_json(nlohmann::json& j, const SimResult& r) {
  j = nlohmann::json{{"rejection_rate", r.rejection_rate},
                     {"replications", r.replications},
                     {"binomial_se", r.binomial_se},
                     {"wall_time_s", r.wall_time_s}};
}

}  // namespace additest
