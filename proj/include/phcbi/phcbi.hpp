#pragma once

// Casimir-based control by interconnection for linear port-Hamiltonian
// systems: synthesis, obstacle classification, energy-shaping / IDA
// verification, and monitored closed-loop simulation.

#include "phcbi/casimir.hpp"
#include "phcbi/errors.hpp"
#include "phcbi/hamiltonian.hpp"
#include "phcbi/model_io.hpp"
#include "phcbi/numerics.hpp"
#include "phcbi/pipeline.hpp"
#include "phcbi/report.hpp"
#include "phcbi/rlc.hpp"
#include "phcbi/shaping.hpp"
#include "phcbi/sim.hpp"
#include "phcbi/system.hpp"
