#pragma once

#include "mpspec/pencil.hpp"

#include <vector>

namespace mpspec {

/// eta(lambda, x) = ||M(lambda) x|| / (gamma ||x||). Zero for an exact pair even
/// when gamma = 0; +infinity when the residual is nonzero and gamma = 0.
double eigenpair_backward_error(const MultiParamPencil& pencil, const PerturbationModel& model,
                                const Eigenpair& pair);

/// eta(lambda) = sigma_min(M(lambda)) / gamma, the minimum of the eigenpair error
/// over unit vectors.
double eigenvalue_backward_error(const MultiParamPencil& pencil, const PerturbationModel& model,
                                 const EigenTuple& lambda);

/// Rank-one perturbations Delta C_t (one per pencil term) of norm eta * ||E_t||
/// that make (lambda, x) an exact eigenpair of the perturbed pencil.
std::vector<CMatrix> attaining_perturbations(const MultiParamPencil& pencil,
                                             const PerturbationModel& model,
                                             const Eigenpair& pair);

/// The pencil with every coefficient C_t replaced by C_t + deltas[t].
MultiParamPencil perturbed(const MultiParamPencil& pencil, const std::vector<CMatrix>& deltas);

}  // namespace mpspec
