#pragma once

#include <vector>

#include "sdgsim/device.hpp"

// Bistable storage cell: DC operating points, transfer curves, stability
// and writability margins. Inverter 1 is N1/P1 (input Q, output QZ) and
// returns through the VG1 ground node; inverter 2 is N2/P2 (input QZ,
// output Q) through VG2. N3 couples Q to the bitline. The 6T variant adds
// A2 from QZ to the complement bitline.

namespace sdg {

enum class CellKind { FiveTSDG, SixT };

struct CellTopology {
  CellKind kind = CellKind::FiveTSDG;
  DeviceParams n1, p1, n2, p2, n3, a2;
  double cell_ratio_beta = 1.0;

  // Five-device cell with separately biased inverter grounds. High-Vt
  // inverters keep standby leakage down; the access device stays
  // standard-Vt so the write path is not starved.
  static CellTopology five_t_sdg(VtFlavor inverter = VtFlavor::HVT,
                                 VtFlavor access = VtFlavor::SVT);

  // Conventional differential cell. beta widens the driver NMOS pair
  // relative to the access devices for read stability.
  static CellTopology six_t(double beta = 1.4,
                            VtFlavor inverter = VtFlavor::HVT,
                            VtFlavor access = VtFlavor::SVT);
};

// Every external node the cell sees. vssm is the raised-ground rail value
// the array schemes use; vg1/vg2 are what the cell's ground nodes actually
// sit at for this condition, which need not equal vssm.
struct BiasCondition {
  double vddm = 1.3;
  double vssm = 0.6;
  double vg1 = 0.6;
  double vg2 = 0.6;
  double vbl = 0.6;
  double vblz = 1.3;
  double vwl = 0.0;
};

BiasCondition standby_bias(CellKind k, double vddm, double vssm);
BiasCondition read_bias(CellKind k, double vddm, double vssm);

struct NodeVoltages {
  double q = 0.0;
  double qz = 0.0;
};

// Cell devices folded with one corner and temperature so solver loops
// never re-derive model constants.
struct FoldedCell {
  CellKind kind = CellKind::FiveTSDG;
  EffDevice n1, p1, n2, p2, n3, a2;
  bool has_a2 = false;
};

FoldedCell fold_cell(const CellTopology& c, const Corner& k);
FoldedCell fold_cell(const CellTopology& c, const Corner& k,
                     double temperature_c);

// Net current out of a storage node at the given node pair; positive
// discharges the node. These are the residuals the DC solver drives to
// zero, exposed so tests can probe them directly.
double node_current_q(const FoldedCell& f, const BiasCondition& b, double q,
                      double qz);
double node_current_qz(const FoldedCell& f, const BiasCondition& b, double q,
                       double qz);

struct DcResult {
  NodeVoltages v;
  bool converged = false;
  double residual_a = 0.0;  // max |node current| at the solution
  int iterations = 0;
};

// Relaxation-guided solve that lands in the basin the initial guess
// belongs to, never on the metastable crossing. Calling it again on its
// own answer returns that answer unchanged.
DcResult dc_solve(const FoldedCell& f, const BiasCondition& b,
                  NodeVoltages init);
DcResult dc_solve(const CellTopology& c, const Corner& k,
                  const BiasCondition& b, NodeVoltages init);

// Stable state for a stored bit under the given bias.
NodeVoltages stored_state(const FoldedCell& f, const BiasCondition& b,
                          bool bit);

// Equilibrium transfer curves. vtc1 gives QZ for a forced Q (inverter 1
// plus whatever the complement access contributes); vtc2 gives Q for a
// forced QZ (inverter 2 plus bitline access).
double vtc1(const FoldedCell& f, const BiasCondition& b, double q);
double vtc2(const FoldedCell& f, const BiasCondition& b, double qz);

// Input level where inverter 1 crosses unity, at the bias as given.
double trip_voltage(const FoldedCell& f, const BiasCondition& b);
double trip_voltage(const CellTopology& c, const Corner& k,
                    const BiasCondition& b);

struct Curve {
  std::vector<double> x;
  std::vector<double> y;
};

enum class Extraction { SeevinckSquare, TripCrossing, BisectionFlip };

struct MarginResult {
  double value_mv = 0.0;
  double lobe1_mv = 0.0;  // diagonal eye opening, one polarity
  double lobe2_mv = 0.0;  // and the other
  bool monostable = false;
  Extraction extraction = Extraction::SeevinckSquare;
  Curve curve_a;  // (q, vtc1(q))
  Curve curve_b;  // (vtc2(qz), qz)
};

// Mirrored transfer-curve pair at the given bias. With the wordline up
// this is the read butterfly; with it down, the hold butterfly.
void butterfly(const FoldedCell& f, const BiasCondition& b, Curve& curve_a,
               Curve& curve_b);

// Static noise margin from the butterfly diagram at the given bias:
// largest square between the mirrored transfer curves, smaller lobe wins.
MarginResult snm(const FoldedCell& f, const BiasCondition& b);
MarginResult snm(const CellTopology& c, const Corner& k,
                 const BiasCondition& b);

// Read noise margin: read bias with the bitline clamped at bl_bias.
MarginResult rnm(const CellTopology& c, const Corner& k, double vddm,
                 double vssm, double bl_bias);

// Hold-state margin of a half-selected cell whose ground nodes sit at the
// levels a neighboring write drags them to.
MarginResult w1_disturb_snm(const CellTopology& c, const Corner& k,
                            double vddm, double vssm, double vg1, double vg2);

// Disturbed storage levels with the wordline up: how far a stored 0 is
// dragged up and a stored 1 dragged down by the bitline.
struct ReadLevels {
  double q_low_v = 0.0;   // stored-0 node after disturb
  double q_high_v = 0.0;  // stored-1 node after disturb
};

ReadLevels read_disturb_levels(const FoldedCell& f, const BiasCondition& b);

enum class WriteKind { WriteZero, WriteOne };

struct WriteResult {
  double margin_v = 0.0;
  bool writable = false;
};

// Quasi-static write margin by bisecting the bitline level at which the
// stored state's basin collapses. WriteZero reports the highest bitline
// voltage that still flips a stored 1; WriteOne reports how far below
// vddm the bitline may sag and still flip a stored 0. The bias carries
// the wordline and ground-node levels the write pulse applies.
WriteResult write_margin(const FoldedCell& f, const BiasCondition& write_bias,
                         WriteKind kind);
WriteResult write_margin(const CellTopology& c, const Corner& k,
                         const BiasCondition& write_bias, WriteKind kind);

// Ground level the write-one equalizer actually delivers on VG1 while
// the write driver fights it through its own pulldown.
double equalizer_delivered_v(double vssm, double g_equalizer_s,
                             double g_pulldown_s);

// Channel currents at a solved operating point, each in the direction
// its name states. Useful for leakage accounting and KCL checks.
struct BranchCurrents {
  double p1_vddm_to_qz = 0.0;
  double n1_qz_to_vg1 = 0.0;
  double p2_vddm_to_q = 0.0;
  double n2_q_to_vg2 = 0.0;
  double n3_q_to_vbl = 0.0;
  double a2_qz_to_vblz = 0.0;
};

BranchCurrents branch_currents(const FoldedCell& f, const BiasCondition& b,
                               NodeVoltages v);

}  // namespace sdg
