#pragma once

#include <string>

namespace gpfewshot::figures {

/// Normalized-regret bound versus evaluations: columns N,T,bound for
/// N in {1e5, 1e10, 1e15, 1e20}, T log-spaced over [500, N].
std::string figure1_csv();

/// Evaluations needed for a target regret: columns
/// N,target_normreg,required_T_bisection,required_T_envelope.
std::string figure2_csv();

/// Continuous bound against the a-priori grid bound over a Lipschitz sweep:
/// columns panel,variant,param,lk,value. Panel d_sweep fixes T=1e5 and
/// varies D in 1..10; panel t_sweep fixes D=5 and varies T in 1e1..1e10.
/// Rows where the bound formula is undefined are omitted.
std::string figure3_csv();

std::string figure_csv(int figure_id);

}  // namespace gpfewshot::figures
