#include "sdgsim/sequencer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace sdg {

const char* access_kind_name(AccessKind k) {
  switch (k) {
    case AccessKind::Standby: return "STBY";
    case AccessKind::Read: return "READ";
    case AccessKind::Write: return "WRITE";
  }
  return "?";
}

const char* upset_kind_name(UpsetKind k) {
  switch (k) {
    case UpsetKind::ReadUpset: return "ReadUpset";
    case UpsetKind::WriteDisturb: return "WriteDisturb";
    case UpsetKind::WriteFail: return "WriteFail";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using State = std::vector<double>;
using Deriv = std::function<void(double, const State&, State&)>;
using Measure = std::function<double(const State&)>;

// Adaptive midpoint integrator that stops at the sign change of `measure`
// and interpolates the crossing time. Returns +inf when t_max passes first.
double integrate_to_crossing(const Deriv& deriv, const Measure& measure,
                             State y, double t_max) {
  constexpr double kTol = 2e-5;
  constexpr double kMinStep = 1e-16;

  auto step = [&](const State& from, double t, double h, State& out) {
    State k1(from.size()), mid(from.size());
    deriv(t, from, k1);
    for (size_t i = 0; i < from.size(); ++i) mid[i] = from[i] + 0.5 * h * k1[i];
    State k2(from.size());
    deriv(t + 0.5 * h, mid, k2);
    out.resize(from.size());
    for (size_t i = 0; i < from.size(); ++i) out[i] = from[i] + h * k2[i];
  };

  double t = 0.0;
  double h = 1e-13;
  double m_prev = measure(y);
  if (m_prev <= 0.0) return 0.0;

  State big, half, tmp;
  while (t < t_max) {
    step(y, t, h, big);
    step(y, t, 0.5 * h, tmp);
    step(tmp, t + 0.5 * h, 0.5 * h, half);
    double err = 0.0;
    for (size_t i = 0; i < y.size(); ++i)
      err = std::max(err, std::fabs(big[i] - half[i]));
    if (err > kTol) {
      h *= 0.5;
      if (h < kMinStep)
        throw std::runtime_error("delay integration: step underflow");
      continue;
    }
    double m_new = measure(half);
    if (m_new <= 0.0) {
      double frac = m_prev / (m_prev - m_new);  // linear inside the step
      return t + frac * h;
    }
    y = half;
    t += h;
    m_prev = m_new;
    if (err < 0.25 * kTol) h *= 1.8;
  }
  return kInf;
}

double wl_at(double t, double slew, double vddm) {
  return std::min(vddm, slew * t);
}

// Quasi-static flip level: marches the wordline up while tracking the
// stored branch, returns the WL voltage where the measure first crosses.
double quasi_static_wl(const FoldedCell& f, BiasCondition b, NodeVoltages init,
                       double vddm,
                       const std::function<double(const NodeVoltages&)>& m) {
  double w_prev = 0.0;
  b.vwl = 0.0;
  NodeVoltages nv = dc_solve(f, b, init).v;
  double m_prev = m(nv);
  if (m_prev <= 0.0) return 0.0;
  for (double w = 0.002; w <= vddm + 1e-12; w += 0.002) {
    b.vwl = std::min(w, vddm);
    nv = dc_solve(f, b, nv).v;
    double mv = m(nv);
    if (mv <= 0.0) {
      double frac = m_prev / (m_prev - mv);
      return w_prev + frac * (b.vwl - w_prev);
    }
    w_prev = b.vwl;
    m_prev = mv;
  }
  return kInf;
}

struct WriteSetup {
  FoldedCell f;
  BiasCondition bias;     // wordline left at 0, ramped by the caller
  NodeVoltages start;     // stored state before the access
};

WriteSetup write_setup(const CellTopology& cell, const Corner& corner,
                       double vddm, double vssm, double vg1, double vg2,
                       bool write_one) {
  WriteSetup s{fold_cell(cell, corner), {}, {}};
  BiasCondition hold = standby_bias(cell.kind, vddm, vssm);
  s.start = stored_state(s.f, hold, !write_one);
  s.bias = hold;
  s.bias.vg1 = vg1;
  s.bias.vg2 = vg2;
  s.bias.vbl = write_one ? vddm : 0.0;
  if (cell.kind == CellKind::SixT) s.bias.vblz = vddm - s.bias.vbl;
  s.bias.vwl = 0.0;
  return s;
}

double write_delay_impl(const CellTopology& cell, const Corner& corner,
                        const TimingModel& t, double vddm, double vssm,
                        double vg1, double vg2, bool write_one) {
  WriteSetup s = write_setup(cell, corner, vddm, vssm, vg1, vg2, write_one);
  double thresh = write_one ? 0.8 * vddm : 0.2 * vddm;
  double t50 = 0.5 * vddm / t.wl_slew_v_per_s;

  if (t.c_node_f <= 0.0) {
    auto m = [&](const NodeVoltages& nv) {
      return write_one ? thresh - nv.q : nv.q - thresh;
    };
    double w = quasi_static_wl(s.f, s.bias, s.start, vddm, m);
    if (!std::isfinite(w)) return kInf;
    return std::max(0.0, (w - 0.5 * vddm) / t.wl_slew_v_per_s);
  }

  Deriv deriv = [&](double time, const State& y, State& dy) {
    BiasCondition b = s.bias;
    b.vwl = wl_at(time, t.wl_slew_v_per_s, vddm);
    dy[0] = -node_current_q(s.f, b, y[0], y[1]) / t.c_node_f;
    dy[1] = -node_current_qz(s.f, b, y[0], y[1]) / t.c_node_f;
  };
  Measure measure = [&](const State& y) {
    return write_one ? thresh - y[0] : y[0] - thresh;
  };
  double t_cross = integrate_to_crossing(deriv, measure, {s.start.q, s.start.qz},
                                         t.t_max_s);
  if (!std::isfinite(t_cross)) return kInf;
  return std::max(0.0, t_cross - t50);
}

}  // namespace

double w1_delay(const CellTopology& cell, const Corner& corner,
                const TimingModel& t, double vddm, double vssm, double vg1,
                double vg2) {
  return write_delay_impl(cell, corner, t, vddm, vssm, vg1, vg2, true);
}

double w0_delay(const CellTopology& cell, const Corner& corner,
                const TimingModel& t, double vddm, double vssm, double vg1,
                double vg2) {
  return write_delay_impl(cell, corner, t, vddm, vssm, vg1, vg2, false);
}

double read_delay(const CellTopology& cell, const Corner& corner,
                  const TimingModel& t, const ArrayConfig& a, double vddm,
                  double vssm) {
  FoldedCell f = fold_cell(cell, corner);
  BiasCondition hold = standby_bias(cell.kind, vddm, vssm);
  NodeVoltages start = stored_state(f, hold, false);
  BiasCondition rb = read_bias(cell.kind, vddm, vssm);
  double thresh = t.sense_frac * vssm;
  double t50 = 0.5 * vddm / t.wl_slew_v_per_s;

  if (t.c_node_f <= 0.0) {
    // Quasi-static cell: only the bitline integrates, the storage nodes
    // follow the DC branch at each level.
    NodeVoltages track = start;
    Deriv deriv = [&, track](double time, const State& y,
                             State& dy) mutable {
      BiasCondition b = rb;
      b.vbl = y[0];
      b.vwl = wl_at(time, t.wl_slew_v_per_s, vddm);
      track = dc_solve(f, b, track).v;
      dy[0] = branch_currents(f, b, track).n3_q_to_vbl / a.c_bl_f;
    };
    Measure measure = [&](const State& y) { return y[0] - thresh; };
    double tc = integrate_to_crossing(deriv, measure, {vssm}, t.t_max_s);
    if (!std::isfinite(tc)) return kInf;
    return std::max(0.0, tc - t50);
  }

  Deriv deriv = [&](double time, const State& y, State& dy) {
    BiasCondition b = rb;
    b.vbl = y[2];
    b.vwl = wl_at(time, t.wl_slew_v_per_s, vddm);
    dy[0] = -node_current_q(f, b, y[0], y[1]) / t.c_node_f;
    dy[1] = -node_current_qz(f, b, y[0], y[1]) / t.c_node_f;
    NodeVoltages nv{y[0], y[1]};
    dy[2] = branch_currents(f, b, nv).n3_q_to_vbl / a.c_bl_f;
  };
  Measure measure = [&](const State& y) { return y[2] - thresh; };
  double tc =
      integrate_to_crossing(deriv, measure, {start.q, start.qz, vssm}, t.t_max_s);
  if (!std::isfinite(tc)) return kInf;
  return std::max(0.0, tc - t50);
}

double w1_disturb_scan(const CellTopology& cell, const Corner& corner,
                       double vddm, double vssm, double g_equalizer_s,
                       double g_w1_pulldown_s) {
  double vg1 = equalizer_delivered_v(vssm, g_equalizer_s, g_w1_pulldown_s);
  MarginResult m = w1_disturb_snm(cell, corner, vddm, vssm, vg1, vssm);
  return m.monostable ? 0.0 : m.value_mv;
}

WordArray::WordArray(const CellTopology& cell, const Corner& corner,
                     const ArrayConfig& array, const TimingModel& timing,
                     double vddm, double vssm, const WriteDrive& drive)
    : cell_(cell),
      corner_(corner),
      array_(array),
      timing_(timing),
      vddm_(vddm),
      vssm0_(vssm),
      drive_(drive),
      leak_(cell, corner, array, vddm),
      words_(array.cells_per_subcolumn, 0) {
  vssm_.vssm = standby_equilibrium(leak_.as_fn(), vddm);
  vssm_.n_b0 = 0;
  vssm_.n_b1 = 0;
}

double WordArray::read_delay_s() {
  if (!memo_read_delay_)
    memo_read_delay_ =
        read_delay(cell_, corner_, timing_, array_, vddm_, vssm0_);
  return *memo_read_delay_;
}

double WordArray::w0_delay_s() {
  if (!memo_w0_delay_)
    memo_w0_delay_ = w0_delay(cell_, corner_, timing_, vddm_, vssm0_,
                              drive_.w0_vg1_v, vssm0_);
  return *memo_w0_delay_;
}

double WordArray::w1_delay_s() {
  if (!memo_w1_delay_)
    memo_w1_delay_ = w1_delay(cell_, corner_, timing_, vddm_, vssm0_,
                              drive_.w1_vg1_v, vssm0_);
  return *memo_w1_delay_;
}

bool WordArray::w1_writable() {
  if (!memo_w1_ok_) {
    WriteSetup s = write_setup(cell_, corner_, vddm_, vssm0_,
                               drive_.w1_vg1_v, vssm0_, true);
    BiasCondition b = s.bias;
    b.vwl = vddm_;
    NodeVoltages nv = dc_solve(s.f, b, s.start).v;
    memo_w1_ok_ = nv.q > nv.qz;
  }
  return *memo_w1_ok_;
}

bool WordArray::w0_writable() {
  if (!memo_w0_ok_) {
    WriteSetup s = write_setup(cell_, corner_, vddm_, vssm0_,
                               drive_.w0_vg1_v, vssm0_, false);
    BiasCondition b = s.bias;
    b.vwl = vddm_;
    NodeVoltages nv = dc_solve(s.f, b, s.start).v;
    memo_w0_ok_ = nv.q < nv.qz;
  }
  return *memo_w0_ok_;
}

bool WordArray::read_stable() {
  if (!memo_read_stable_) {
    FoldedCell f = fold_cell(cell_, corner_);
    BiasCondition rb = read_bias(cell_.kind, vddm_, vssm0_);
    NodeVoltages lo = stored_state(f, rb, false);
    NodeVoltages hi = stored_state(f, rb, true);
    memo_read_stable_ = (lo.q < lo.qz) && (hi.q > hi.qz);
  }
  return *memo_read_stable_;
}

double WordArray::disturb_margin_mv() {
  if (!memo_disturb_mv_)
    memo_disturb_mv_ =
        w1_disturb_scan(cell_, corner_, vddm_, vssm0_, drive_.g_equalizer_s,
                        drive_.g_w1_pulldown_s);
  return *memo_disturb_mv_;
}

std::vector<OpResult> WordArray::execute(const std::vector<OpCommand>& ops) {
  std::vector<OpResult> results;
  results.reserve(ops.size());
  int bits = array_.bits_per_word;
  uint16_t mask =
      bits >= 16 ? 0xffffu : static_cast<uint16_t>((1u << bits) - 1u);

  for (size_t idx = 0; idx < ops.size(); ++idx) {
    const OpCommand& op = ops[idx];
    OpResult res;
    res.kind = op.kind;
    res.address = op.address;

    switch (op.kind) {
      case AccessKind::Standby: {
        vssm_ = step_standby_cycle(vssm_, array_, leak_.as_fn());
        events_.push_back({static_cast<int>(idx), op.kind, 0, 0, 0, 0.0});
        break;
      }
      case AccessKind::Read: {
        uint16_t w = words_.at(op.address) & mask;
        int ones = __builtin_popcount(w);
        int zeros = bits - ones;
        res.read_data = w;
        res.delay_s = read_delay_s();
        if (!read_stable()) {
          // A flipped cell still pulled its line first; the sensed value
          // reflects the pre-flip data, the stored value does not.
          for (int b = 0; b < bits; ++b) {
            bool bit = (w >> b) & 1u;
            FoldedCell f = fold_cell(cell_, corner_);
            BiasCondition rb = read_bias(cell_.kind, vddm_, vssm0_);
            NodeVoltages nv = stored_state(f, rb, bit);
            bool flipped = bit ? (nv.q < nv.qz) : (nv.q > nv.qz);
            if (flipped) {
              res.flags.push_back({b, UpsetKind::ReadUpset});
              words_[op.address] ^= static_cast<uint16_t>(1u << b);
            }
          }
        }
        VssmState st = vssm_;
        st.n_b0 = zeros;
        st.n_b1 = ones;
        vssm_ = step_read_cycle(st, array_, leak_.as_fn());
        events_.push_back(
            {static_cast<int>(idx), op.kind, op.address, zeros, ones,
             res.delay_s});
        break;
      }
      case AccessKind::Write: {
        uint16_t cur = words_.at(op.address) & mask;
        uint16_t tgt = op.data & mask;
        bool any_w1 = false, any_w0 = false;
        for (int b = 0; b < bits; ++b) {
          bool cb = (cur >> b) & 1u;
          bool tb = (tgt >> b) & 1u;
          if (tb)
            any_w1 = true;
          else
            any_w0 = true;
          if (cb == tb) continue;
          bool ok = tb ? w1_writable() : w0_writable();
          if (ok) {
            cur ^= static_cast<uint16_t>(1u << b);
          } else {
            res.flags.push_back({b, UpsetKind::WriteFail});
          }
        }
        words_[op.address] = cur;
        double d = 0.0;
        if (any_w0) d = std::max(d, w0_delay_s());
        if (any_w1) d = std::max(d, w1_delay_s());
        res.delay_s = d;
        if (any_w1 && disturb_margin_mv() <= 0.0) {
          res.flags.push_back({-1, UpsetKind::WriteDisturb});
        }
        int ones = __builtin_popcount(tgt);
        int zeros = bits - ones;
        VssmState st = vssm_;
        st.n_b0 = zeros;
        st.n_b1 = ones;
        vssm_ = step_cycle_with_levels(st, array_, leak_.as_fn(), 0.0, vddm_);
        events_.push_back(
            {static_cast<int>(idx), op.kind, op.address, zeros, ones,
             res.delay_s});
        break;
      }
    }
    res.vssm_after = vssm_.vssm;
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace sdg
