#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdgsim/array.hpp"
#include "sdgsim/cell.hpp"

namespace sdg {

enum class AccessKind { Standby, Read, Write };
const char* access_kind_name(AccessKind k);  // STBY / READ / WRITE

struct OpCommand {
  AccessKind kind = AccessKind::Standby;
  int address = 0;
  uint16_t data = 0;  // write payload, bit i -> column i
};

struct TimingModel {
  double wl_slew_v_per_s = 5e9;
  double c_node_f = 0.4e-15;  // storage-node loading for delay integration
  double sense_frac = 0.5;    // '0' detected once BL falls below this * vssm
  double write_pulse_s = 1.4e-9;
  double t_max_s = 5e-8;  // give-up horizon for delay integration
};

enum class UpsetKind { ReadUpset, WriteDisturb, WriteFail };
const char* upset_kind_name(UpsetKind k);

struct UpsetFlag {
  int bit = -1;  // column, or -1 when the flag concerns half-selected rows
  UpsetKind kind = UpsetKind::ReadUpset;
};

struct OpResult {
  AccessKind kind = AccessKind::Standby;
  int address = 0;
  std::optional<uint16_t> read_data;
  double delay_s = 0.0;
  double vssm_after = 0.0;
  std::vector<UpsetFlag> flags;
};

// Per-operation accounting the power model can turn into energy.
struct EnergyEvent {
  int op_index = 0;
  AccessKind kind = AccessKind::Standby;
  int address = 0;
  int n_b0 = 0;  // zeros read or written
  int n_b1 = 0;
  double delay_s = 0.0;
};

// Wordline-to-threshold delays from integrating the storage nodes against
// the ramping wordline. All are measured from WL = 50% of vddm. With
// c_node_f = 0 the cell is quasi-static and the delay collapses to the
// wordline-slew floor. Returns +inf when the threshold is never reached.
double w1_delay(const CellTopology& cell, const Corner& corner,
                const TimingModel& t, double vddm, double vssm, double vg1,
                double vg2);
double w0_delay(const CellTopology& cell, const Corner& corner,
                const TimingModel& t, double vddm, double vssm, double vg1,
                double vg2);

// Time for a '0' cell to drag its bitline from the precharge level down to
// the sense threshold. The bitline dominates the storage nodes, which ride
// along with c_node_f each.
double read_delay(const CellTopology& cell, const Corner& corner,
                  const TimingModel& t, const ArrayConfig& a, double vddm,
                  double vssm);

// Hold margin of the rows that share the ground lines with a word being
// written, at the equalizer-delivered levels.
double w1_disturb_scan(const CellTopology& cell, const Corner& corner,
                       double vddm, double vssm, double g_equalizer_s,
                       double g_w1_pulldown_s);

// Ground-line drive during writes. The selected row sees its vg1 pulled to
// w1_vg1_v (write one) or w0_vg1_v (write zero); rows sharing the line are
// protected by the equalizer, whose delivered level the two conductances
// set.
struct WriteDrive {
  double w1_vg1_v = 0.1;  // residual: the pulldown never quite reaches VSS
  double w0_vg1_v = 0.0;
  double g_equalizer_s = 3.0e-3;
  double g_w1_pulldown_s = 1.0e-3;
};

// One sub-block of words sharing a raised-ground tank. Executes command
// sequences functionally: cell flips come from the DC solver, delays and
// the tank voltage from the dynamic models, everything memoized per
// instance so long sequences cost almost nothing beyond the first op of
// each kind. Deterministic: same commands, same results.
class WordArray {
 public:
  WordArray(const CellTopology& cell, const Corner& corner,
            const ArrayConfig& array, const TimingModel& timing, double vddm,
            double vssm, const WriteDrive& drive);

  std::vector<OpResult> execute(const std::vector<OpCommand>& ops);
  const std::vector<EnergyEvent>& events() const { return events_; }
  uint16_t word(int address) const { return words_.at(address); }
  double vssm_now() const { return vssm_.vssm; }

  double read_delay_s();
  double w0_delay_s();
  double w1_delay_s();
  bool w1_writable();
  bool w0_writable();
  bool read_stable();          // neither stored polarity flips under read
  double disturb_margin_mv();  // half-selected hold margin during W1

 private:
  CellTopology cell_;
  Corner corner_;
  ArrayConfig array_;
  TimingModel timing_;
  double vddm_, vssm0_;
  WriteDrive drive_;
  VssmLeakModel leak_;
  VssmState vssm_;
  std::vector<uint16_t> words_;
  std::vector<EnergyEvent> events_;

  std::optional<double> memo_read_delay_, memo_w0_delay_, memo_w1_delay_;
  std::optional<bool> memo_w0_ok_, memo_w1_ok_, memo_read_stable_;
  std::optional<double> memo_disturb_mv_;
};

}  // namespace sdg
