#pragma once

// Assembles all eigenvalues <= lambda_max of a (possibly perturbed)
// model from its vertical Fourier sectors: the torus sector plus the
// magnetic sectors m = 1, 2, ... (each counted twice: the conjugate
// sector -m has the identical spectrum). Stops at the first m whose
// lowest level clears the cutoff.

#include <cstdint>
#include <vector>

#include "srqe/contact_model.hpp"

namespace srqe::grid {

std::vector<double> assemble_sector_spectrum(const ContactModel& model, double lambda_max,
                                             int n_grid, double tol, std::uint64_t seed,
                                             int max_iter = 400000);

}  // namespace srqe::grid
