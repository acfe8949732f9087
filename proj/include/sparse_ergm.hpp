#ifndef SPARSE_ERGM_HPP
#define SPARSE_ERGM_HPP

// Everything except the CLI (which needs OpenSSL).
#include "sparse_ergm/errors.hpp"
#include "sparse_ergm/rng.hpp"
#include "sparse_ergm/motif.hpp"
#include "sparse_ergm/weight_table.hpp"
#include "sparse_ergm/hom_density.hpp"
#include "sparse_ergm/indep_poly.hpp"
#include "sparse_ergm/optim.hpp"
#include "sparse_ergm/planar.hpp"
#include "sparse_ergm/hamiltonian.hpp"
#include "sparse_ergm/nmf.hpp"
#include "sparse_ergm/ergm_sim.hpp"
#include "sparse_ergm/finner.hpp"
#include "sparse_ergm/io.hpp"

#endif  // SPARSE_ERGM_HPP
