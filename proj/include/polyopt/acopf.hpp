#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "polyopt/pop.hpp"

namespace polyopt {

// One row of the MATPOWER `mpc.bus` table (columns we consume).  Powers are
// stored per-unit, i.e. already divided by the system MVA base.
struct BusRow {
  int id = 0;
  int type = 1;  // 1 = PQ, 2 = PV, 3 = reference
  double pd = 0.0, qd = 0.0;
  double gs = 0.0, bs = 0.0;  // bus shunt, per-unit
  double vm = 1.0, va = 0.0;  // operating point: magnitude (pu), angle (deg)
  double vmax = 1.1, vmin = 0.9;
};

// `mpc.gen` merged positionally with its `mpc.gencost` row.  Limits and set
// points per-unit; cost coefficients keep their $/MWh scaling and apply to
// megawatt output.
struct GenRow {
  int bus = 0;
  double pg = 0.0, qg = 0.0;
  double qmax = 0.0, qmin = 0.0;
  double vg = 1.0;
  double pmax = 0.0, pmin = 0.0;
  double c2 = 0.0, c1 = 0.0, c0 = 0.0;
};

// One in-service row of `mpc.branch`.
struct BranchRow {
  int from = 0, to = 0;
  double r = 0.0, x = 0.0, b = 0.0;  // series impedance, total charging
  double rate_a = 0.0;               // long-term MVA rating per-unit; 0 = none
  double tap = 0.0;                  // off-nominal ratio at the from end; 0 = 1
  double shift = 0.0;                // phase shift (deg); nonzero unsupported
};

struct Network {
  double base_mva = 100.0;
  std::vector<BusRow> buses;
  std::vector<GenRow> gens;
  std::vector<BranchRow> branches;
  std::vector<std::string> warnings;  // ignored fields, skipped rows

  int bus_index(int id) const;  // position in `buses`; InputError if unknown
  bool has_gen(int bus_id) const;
};

// Parses the `mpc.baseMVA`, `mpc.bus`, `mpc.gen`, `mpc.branch`, `mpc.gencost`
// assignments of a MATPOWER case file (version 2 matrix syntax).  Applies
// per-unit conversion, merges gencost into the generator rows, and drops
// out-of-service rows with a warning.  Structural problems (missing table,
// malformed number, inconsistent column count, non-polynomial cost model)
// raise ParseError carrying the offending line number.
Network parse_matpower(const std::string& text);

struct BuildOptions {
  bool both_end_limits = false;  // also impose S-limits at the to end
  bool alt_flow_form = false;    // alternative reactive-flow convention (see README)
};

// The rectangular ACOPF POP over x = (Re V, Im V).  `labels` tags every
// constraint row ("P-upper@bus 2", "S-limit@branch 8-9", ...), and
// `label_index` inverts the map.
struct AcopfPop {
  Pop pop;
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> label_index;
  int n_bus = 0;
  std::vector<Polynomial> p_inj, q_inj;  // net injection polynomials per bus
};

// Net complex power injection polynomials P_k, Q_k at every bus, from the
// network admittance matrix (series elements, line charging, bus shunts,
// off-nominal taps).  Generation at bus k is injection plus load.
std::pair<std::vector<Polynomial>, std::vector<Polynomial>> injection_polynomials(
    const Network& net);

// Active/reactive flow into branch `b` measured at its from (or to) end.
std::pair<Polynomial, Polynomial> branch_flow(const Network& net, int b,
                                              bool from_side,
                                              bool alt_form = false);

AcopfPop build_pop(const Network& net, const BuildOptions& opt = {});

// x = (Vm cos Va, Vm sin Va) from the operating point stored in the file.
Eigen::VectorXd reference_point(const Network& net);

// Generation cost at the PG set points stored in the file, in $/h.
double reference_objective(const Network& net);

// Max component degree of reduce(apop.pop, active).
int reduced_kkt_degree(const AcopfPop& apop, const ActiveSet& active);

}  // namespace polyopt
