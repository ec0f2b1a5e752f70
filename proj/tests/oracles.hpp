#pragma once

// Test-only reference implementations, written independently of the library
// code paths they check: plain index loops, no shared helpers. If a library
// op and its oracle agree to tight tolerance on random instances, a bug would
// have to exist twice.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "blcn/bilstm.hpp"
#include "blcn/lstm.hpp"
#include "blcn/metrics.hpp"
#include "blcn/rng.hpp"
#include "blcn/tensor.hpp"

namespace oracle {

// --- tolerance helpers ------------------------------------------------------

// Relative comparison with an absolute floor for near-zero pairs. The floor
// matters for finite differences: with step 1e-6 the FD noise on an O(1)
// objective sits around 1e-10, so 1e-8 cleanly separates "both zero" from
// "disagreement".
inline bool close_rel(double a, double b, double rel_tol, double abs_floor = 1e-8) {
    const double diff = std::fabs(a - b);
    if (diff <= abs_floor) return true;
    return diff <= rel_tol * std::max(std::fabs(a), std::fabs(b));
}

inline double rel_err(double a, double b) {
    const double denom = std::max({std::fabs(a), std::fabs(b), 1e-12});
    return std::fabs(a - b) / denom;
}

// --- finite differences -----------------------------------------------------

// Central difference of a scalar objective w.r.t. one storage slot. The
// objective closure must recompute from scratch (it sees the perturbed slot).
inline double central_diff(const std::function<double()>& f, double& slot, double h = 1e-6) {
    const double saved = slot;
    slot = saved + h;
    const double fp = f();
    slot = saved - h;
    const double fm = f();
    slot = saved;
    return (fp - fm) / (2.0 * h);
}

// --- random fills -----------------------------------------------------------

inline void fill_uniform(blcn::Tensor& t, blcn::Rng& rng, double lo = -1.0, double hi = 1.0) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
}

inline blcn::Tensor random_tensor(std::vector<std::size_t> shape, blcn::Rng& rng, double lo = -1.0,
                                  double hi = 1.0) {
    blcn::Tensor t(std::move(shape));
    fill_uniform(t, rng, lo, hi);
    return t;
}

inline void fill_lstm_params(blcn::LstmParams& p, blcn::Rng& rng, double scale = 0.5) {
    for (blcn::Tensor* t : {&p.W_xi, &p.W_xg, &p.W_xf, &p.W_xo, &p.U_hi, &p.U_hg, &p.U_hf, &p.U_ho,
                            &p.b_i, &p.b_g, &p.b_f, &p.b_o})
        fill_uniform(*t, rng, -scale, scale);
}

// --- linear algebra ---------------------------------------------------------

// Naive triple loop, the textbook definition.
inline blcn::Tensor matmul(const blcn::Tensor& a, const blcn::Tensor& b) {
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    blcn::Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < k; ++l) acc += a.at(i, l) * b.at(l, j);
            out.at(i, j) = acc;
        }
    return out;
}

// --- LSTM / BiLSTM ----------------------------------------------------------

struct LstmOut {
    std::vector<double> h, c;
};

// Straight-line gate equations, scalar loops only:
//   i = sigmoid(W_xi x + U_hi h_prev + b_i)       g = tanh(W_xg x + U_hg h_prev + b_g)
//   f = sigmoid(W_xf x + U_hf h_prev + b_f)       o = sigmoid(W_xo x + U_ho h_prev + b_o)
//   c = f*c_prev + i*g                            h = tanh(c) * o
inline LstmOut lstm_cell(const blcn::LstmParams& p, const std::vector<double>& x,
                         const std::vector<double>& h_prev, const std::vector<double>& c_prev) {
    const std::size_t u = p.hidden_dim(), d = p.input_dim();
    auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    auto gate = [&](const blcn::Tensor& W, const blcn::Tensor& U, const blcn::Tensor& b,
                    std::size_t row) {
        double acc = b[row];
        for (std::size_t j = 0; j < d; ++j) acc += W.at(row, j) * x[j];
        for (std::size_t j = 0; j < u; ++j) acc += U.at(row, j) * h_prev[j];
        return acc;
    };
    LstmOut out;
    out.h.resize(u);
    out.c.resize(u);
    for (std::size_t r = 0; r < u; ++r) {
        const double i = sig(gate(p.W_xi, p.U_hi, p.b_i, r));
        const double g = std::tanh(gate(p.W_xg, p.U_hg, p.b_g, r));
        const double f = sig(gate(p.W_xf, p.U_hf, p.b_f, r));
        const double o = sig(gate(p.W_xo, p.U_ho, p.b_o, r));
        out.c[r] = f * c_prev[r] + i * g;
        out.h[r] = std::tanh(out.c[r]) * o;
    }
    return out;
}

// Two independent recurrences from zero state — ascending with the forward
// params, descending with the backward params — combined per step.
inline blcn::Tensor bilstm(const blcn::BiLstmParams& p, const blcn::Tensor& x_seq) {
    const std::size_t T = x_seq.dim(0), d = x_seq.dim(1), u = p.hidden_dim();
    auto row = [&](std::size_t t) {
        std::vector<double> v(d);
        for (std::size_t j = 0; j < d; ++j) v[j] = x_seq.at(t, j);
        return v;
    };

    std::vector<std::vector<double>> hf(T), hb(T);
    std::vector<double> h(u, 0.0), c(u, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        LstmOut s = lstm_cell(p.forward, row(t), h, c);
        hf[t] = s.h;
        h = s.h;
        c = s.c;
    }
    h.assign(u, 0.0);
    c.assign(u, 0.0);
    for (std::size_t t = T; t-- > 0;) {
        LstmOut s = lstm_cell(p.backward, row(t), h, c);
        hb[t] = s.h;
        h = s.h;
        c = s.c;
    }

    if (p.mode == blcn::BiLstmMode::Concat) {
        blcn::Tensor out({T, 2 * u});
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t j = 0; j < u; ++j) {
                out.at(t, j) = hf[t][j];
                out.at(t, u + j) = hb[t][j];
            }
        return out;
    }
    const std::size_t o = p.W_fy.dim(0);
    blcn::Tensor out({T, o});
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t r = 0; r < o; ++r) {
            double acc = p.b_y[r];
            for (std::size_t j = 0; j < u; ++j)
                acc += p.W_fy.at(r, j) * hf[t][j] + p.W_by.at(r, j) * hb[t][j];
            out.at(t, r) = acc;
        }
    return out;
}

// --- conv1d -----------------------------------------------------------------

// Nested-loop valid cross-correlation: out[t][kk] = b[kk] + sum_{j,c} K[kk][j][c] x[t+j][c]
inline blcn::Tensor conv1d(const blcn::Tensor& kernels, const blcn::Tensor& bias,
                           const blcn::Tensor& x) {
    const std::size_t K = kernels.dim(0), k = kernels.dim(1), cin = kernels.dim(2);
    const std::size_t L = x.dim(0);
    blcn::Tensor out({L - k + 1, K});
    for (std::size_t t = 0; t + k <= L; ++t)
        for (std::size_t kk = 0; kk < K; ++kk) {
            double acc = bias[kk];
            for (std::size_t j = 0; j < k; ++j)
                for (std::size_t c = 0; c < cin; ++c)
                    acc += kernels.at(kk, j, c) * x.at(t + j, c);
            out.at(t, kk) = acc;
        }
    return out;
}

// --- metrics ----------------------------------------------------------------

// Direct substitution into the accuracy / recall / precision / F1 formulas.
struct BinaryRates {
    double accuracy = 0.0, recall = 0.0, precision = 0.0, f1 = 0.0;
};

inline BinaryRates binary_metrics(std::uint64_t tp, std::uint64_t tn, std::uint64_t fp,
                                  std::uint64_t fn) {
    BinaryRates r;
    const double dtp = static_cast<double>(tp);
    r.accuracy = (dtp + static_cast<double>(tn)) / static_cast<double>(tp + tn + fp + fn);
    r.recall = dtp / static_cast<double>(tp + fn);
    r.precision = dtp / static_cast<double>(tp + fp);
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

// --- decision stump ---------------------------------------------------------

// Best single-feature threshold classifier over (feature value, is_positive)
// pairs; returns its training accuracy. Used as an independent separability
// check on synthetic classes.
inline double stump_accuracy(const std::vector<std::vector<double>>& features,
                             const std::vector<bool>& positive) {
    const std::size_t n = positive.size();
    double best = 0.0;
    for (const std::vector<double>& col : features) {
        std::vector<double> sorted = col;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> cuts{sorted.front() - 1.0};
        for (std::size_t i = 0; i + 1 < n; ++i) cuts.push_back((sorted[i] + sorted[i + 1]) / 2.0);
        cuts.push_back(sorted.back() + 1.0);
        for (double cut : cuts) {
            std::size_t above_pos = 0;
            for (std::size_t i = 0; i < n; ++i)
                if ((col[i] > cut) == positive[i]) ++above_pos;
            const double acc =
                std::max(above_pos, n - above_pos) / static_cast<double>(n);
            best = std::max(best, acc);
        }
    }
    return best;
}

// --- pcap fixtures ----------------------------------------------------------

namespace pcapfix {

inline void put16(std::vector<std::uint8_t>& v, std::uint16_t x, bool swap) {
    if (swap) {
        v.push_back(static_cast<std::uint8_t>(x >> 8));
        v.push_back(static_cast<std::uint8_t>(x));
    } else {
        v.push_back(static_cast<std::uint8_t>(x));
        v.push_back(static_cast<std::uint8_t>(x >> 8));
    }
}

inline void put32(std::vector<std::uint8_t>& v, std::uint32_t x, bool swap) {
    if (swap) {
        v.push_back(static_cast<std::uint8_t>(x >> 24));
        v.push_back(static_cast<std::uint8_t>(x >> 16));
        v.push_back(static_cast<std::uint8_t>(x >> 8));
        v.push_back(static_cast<std::uint8_t>(x));
    } else {
        v.push_back(static_cast<std::uint8_t>(x));
        v.push_back(static_cast<std::uint8_t>(x >> 8));
        v.push_back(static_cast<std::uint8_t>(x >> 16));
        v.push_back(static_cast<std::uint8_t>(x >> 24));
    }
}

inline void put_be16(std::vector<std::uint8_t>& v, std::uint16_t x) { put16(v, x, true); }
inline void put_be32(std::vector<std::uint8_t>& v, std::uint32_t x) { put32(v, x, true); }

// The crafted 5-tuple every pcap test asserts against.
constexpr std::uint32_t kSrcIp = 0xc0a8010a;  // 192.168.1.10
constexpr std::uint32_t kDstIp = 0x0a000001;  // 10.0.0.1
constexpr std::uint16_t kSrcPort = 12345;
constexpr std::uint16_t kDstPort = 80;
constexpr std::uint32_t kTsSec = 1700000000;
constexpr std::uint32_t kTsUsec = 250000;

// 24-byte classic global header. swap=true writes every field byte-swapped
// (magic 0xd4c3b2a1), which a conforming reader must normalize away.
inline std::vector<std::uint8_t> global_header(bool swap = false) {
    std::vector<std::uint8_t> v;
    put32(v, 0xa1b2c3d4u, swap);
    put16(v, 2, swap);   // version major
    put16(v, 4, swap);   // version minor
    put32(v, 0, swap);   // thiszone
    put32(v, 0, swap);   // sigfigs
    put32(v, 65535, swap);  // snaplen
    put32(v, 1, swap);   // linktype: Ethernet
    return v;
}

// One 64-byte Ethernet/IPv4/TCP SYN frame, built field by field from the
// header layouts (network byte order inside the frame).
inline std::vector<std::uint8_t> tcp_syn_frame() {
    std::vector<std::uint8_t> f;
    // Ethernet: dst MAC, src MAC, ethertype IPv4
    for (int i = 0; i < 6; ++i) f.push_back(0x02);
    for (int i = 0; i < 6; ++i) f.push_back(0x04);
    put_be16(f, 0x0800);
    // IPv4, 20-byte header, protocol 6 (TCP)
    f.push_back(0x45);  // version 4, IHL 5
    f.push_back(0x00);  // DSCP
    put_be16(f, 50);    // total length: 20 IP + 20 TCP + 10 pad
    put_be16(f, 0x1234);   // identification
    put_be16(f, 0x4000);   // don't-fragment
    f.push_back(64);    // TTL
    f.push_back(6);     // protocol TCP
    put_be16(f, 0);     // checksum (not validated by the parser)
    put_be32(f, kSrcIp);
    put_be32(f, kDstIp);
    // TCP, 20-byte header, SYN set, ACK clear
    put_be16(f, kSrcPort);
    put_be16(f, kDstPort);
    put_be32(f, 1000);  // seq
    put_be32(f, 0);     // ack
    f.push_back(0x50);  // data offset 5
    f.push_back(0x02);  // flags: SYN
    put_be16(f, 64240);    // window
    put_be16(f, 0);     // checksum
    put_be16(f, 0);     // urgent
    // pad the frame out to 64 bytes
    while (f.size() < 64) f.push_back(0x00);
    return f;
}

inline void append_record(std::vector<std::uint8_t>& v, std::uint32_t ts_sec, std::uint32_t ts_usec,
                          const std::vector<std::uint8_t>& frame, bool swap = false) {
    put32(v, ts_sec, swap);
    put32(v, ts_usec, swap);
    put32(v, static_cast<std::uint32_t>(frame.size()), swap);  // caplen
    put32(v, static_cast<std::uint32_t>(frame.size()), swap);  // origlen
    v.insert(v.end(), frame.begin(), frame.end());
}

// The acceptance fixture: exactly one TCP SYN packet.
inline std::vector<std::uint8_t> one_packet_capture(bool swap = false) {
    std::vector<std::uint8_t> v = global_header(swap);
    append_record(v, kTsSec, kTsUsec, tcp_syn_frame(), swap);
    return v;
}

}  // namespace pcapfix

}  // namespace oracle
