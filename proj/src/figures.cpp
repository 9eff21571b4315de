#include "gpfewshot/figures.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "gpfewshot/bounds.hpp"
#include "gpfewshot/errors.hpp"
#include "gpfewshot/jsonout.hpp"

namespace gpfewshot::figures {

namespace {

using jsonout::format_g12;

/// T values for one curve: 500, then {1, 2, 5} per decade up to N, then N.
/// The mantissa grid keeps round anchors such as T = 1e6 on every curve.
std::vector<double> horizon_grid(double n_arms) {
  std::vector<double> ts{500.0};
  for (int decade = 3; ; ++decade) {
    bool past_end = false;
    for (double mantissa : {1.0, 2.0, 5.0}) {
      const double t = mantissa * std::pow(10.0, decade);
      if (t <= 500.0) continue;
      if (t >= n_arms) {
        past_end = true;
        break;
      }
      ts.push_back(t);
    }
    if (past_end) break;
  }
  ts.push_back(n_arms);
  return ts;
}

}  // namespace

std::string figure1_csv() {
  std::string out = "N,T,bound\n";
  for (double exp10 : {5.0, 10.0, 15.0, 20.0}) {
    const double n = std::pow(10.0, exp10);
    for (double t : horizon_grid(n)) {
      out += format_g12(n);
      out += ',';
      out += format_g12(t);
      out += ',';
      out += format_g12(bounds::maximization_normreg_bound(n, t));
      out += '\n';
    }
  }
  return out;
}

std::string figure2_csv() {
  std::string out = "N,target_normreg,required_T_bisection,required_T_envelope\n";
  for (double target : {0.2, 0.4, 0.6, 0.8}) {
    for (int exp10 = 3; exp10 <= 30; ++exp10) {
      const double n = std::pow(10.0, exp10);
      const double bisect = bounds::required_horizon_bisect(n, target);
      const double envelope = bounds::required_evaluations_envelope(n, target);
      out += format_g12(n);
      out += ',';
      out += format_g12(target);
      out += ',';
      out += std::isinf(bisect) ? "inf" : format_g12(bisect);
      out += ',';
      out += format_g12(envelope);
      out += '\n';
    }
  }
  return out;
}

std::string figure3_csv() {
  std::string out = "panel,variant,param,lk,value\n";
  auto emit = [&out](const char* panel, const char* variant, double param,
                     double lk, double value) {
    out += panel;
    out += ',';
    out += variant;
    out += ',';
    out += format_g12(param);
    out += ',';
    out += format_g12(lk);
    out += ',';
    out += format_g12(value);
    out += '\n';
  };

  std::vector<double> lks;
  for (int decade = 1; decade <= 12; ++decade) {
    for (double mantissa : {1.0, 2.0, 5.0}) {
      lks.push_back(mantissa * std::pow(10.0, decade));
    }
  }

  for (int d = 1; d <= 10; ++d) {
    const double t = 1e5;
    for (double lk : lks) {
      emit("d_sweep", "grunewalder", d, lk, bounds::grunewalder_bound(d, t, lk));
      emit("d_sweep", "thm2", d, lk,
           bounds::continuous_regret_formula(d, t, lk, 1.0));
    }
  }
  for (int exp10 = 1; exp10 <= 10; ++exp10) {
    const double t = std::pow(10.0, exp10);
    for (double lk : lks) {
      emit("t_sweep", "grunewalder", t, lk, bounds::grunewalder_bound(5, t, lk));
      try {
        emit("t_sweep", "thm2", t, lk,
             bounds::continuous_regret_formula(5, t, lk, 1.0));
      } catch (const DomainError&) {
        // The formula's log term is undefined at very small T; skip the row.
      }
    }
  }
  return out;
}

std::string figure_csv(int figure_id) {
  switch (figure_id) {
    case 1: return figure1_csv();
    case 2: return figure2_csv();
    case 3: return figure3_csv();
    default: throw DomainError("figure id must be 1, 2 or 3");
  }
}

}  // namespace gpfewshot::figures
