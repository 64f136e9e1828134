#pragma once

#include "tbem/app/config.hpp"
#include "tbem/calderon/calderon.hpp"
#include "tbem/core.hpp"
#include "tbem/cq/cq.hpp"
#include "tbem/cq/march.hpp"
#include "tbem/cq/signals.hpp"
#include "tbem/io/csv.hpp"
#include "tbem/mesh/generate.hpp"
#include "tbem/mesh/io.hpp"
#include "tbem/mesh/surface_mesh.hpp"
#include "tbem/mesh/validate.hpp"
#include "tbem/operators/assembly.hpp"
#include "tbem/operators/potentials.hpp"
#include "tbem/quadrature/kernels.hpp"
#include "tbem/quadrature/panel_pair.hpp"
#include "tbem/quadrature/rules.hpp"
#include "tbem/solver/impedance.hpp"
#include "tbem/solver/manufactured.hpp"
#include "tbem/solver/reconstruct.hpp"
#include "tbem/solver/system.hpp"
#include "tbem/traces/layout.hpp"
#include "tbem/traces/norms.hpp"
#include "tbem/traces/single_trace.hpp"
#include "tbem/verify/probes.hpp"
#include "tbem/verify/report.hpp"
