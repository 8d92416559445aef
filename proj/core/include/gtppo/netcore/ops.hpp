#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gtppo/netcore/kernels.hpp"
#include "gtppo/netcore/tape.hpp"

namespace gtppo::netcore {

namespace detail {

template <typename T>
void require(bool ok, const char* op, const std::string& msg) {
  if (!ok) throw ConfigError(std::string(op) + ": " + msg);
}

template <typename T>
void check_finite(const BasicTensor<T>& t, const char* op) {
  if (!t.all_finite()) throw DivergenceError(std::string(op) + ": non-finite output");
}

template <typename T>
T sigmoid(T z) {
  return T(1) / (T(1) + std::exp(-z));
}

}  // namespace detail

// y = x W + b. `b` may be an invalid Var for a bias-free map.
template <typename T>
Var linear(BasicTape<T>& tape, Var x, Var w, Var b = Var{}) {
  const auto& xv = tape.value(x);
  const auto& wv = tape.value(w);
  const int n = xv.rows(), din = xv.cols();
  detail::require<T>(wv.rank() == 2 && wv.rows() == din, "linear",
                     "weight " + wv.shape_string() + " does not accept input " + xv.shape_string());
  const int dout = wv.cols();
  const T* bias = nullptr;
  if (b.valid()) {
    const auto& bv = tape.value(b);
    detail::require<T>(static_cast<int>(bv.size()) == dout, "linear", "bias " + bv.shape_string());
    bias = bv.data();
  }
  BasicTensor<T> y = BasicTensor<T>::matrix(n, dout);
  kernels::affine_rows(xv.data(), n, din, wv.data(), dout, bias, y.data());
  detail::check_finite(y, "linear");
  return tape.record(std::move(y), {x, w, b.valid() ? b : x}, [x, w, b, n, din, dout](BasicTape<T>& t, Var out) {
    const auto& g = t.grad(out);
    if (t.requires_grad(x)) {
      kernels::accumulate_input_grad(g.data(), n, dout, t.value(w).data(), din, t.grad(x).data());
    }
    if (t.requires_grad(w)) {
      kernels::accumulate_outer(t.value(x).data(), n, din, g.data(), dout, t.grad(w).data());
    }
    if (b.valid() && t.requires_grad(b)) {
      auto& gb = t.grad(b);
      for (int r = 0; r < n; ++r) kernels::axpy(T(1), g.data() + static_cast<std::size_t>(r) * dout, gb.data(), dout);
    }
  });
}

template <typename T>
Var add(BasicTape<T>& tape, Var a, Var b) {
  const auto& av = tape.value(a);
  const auto& bv = tape.value(b);
  detail::require<T>(av.size() == bv.size(), "add", av.shape_string() + " vs " + bv.shape_string());
  BasicTensor<T> y = av;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
  return tape.record(std::move(y), {a, b}, [a, b](BasicTape<T>& t, Var out) {
    const auto& g = t.grad(out);
    const int n = static_cast<int>(g.size());
    if (t.requires_grad(a)) kernels::axpy(T(1), g.data(), t.grad(a).data(), n);
    if (t.requires_grad(b)) kernels::axpy(T(1), g.data(), t.grad(b).data(), n);
  });
}

template <typename T>
Var relu(BasicTape<T>& tape, Var x) {
  BasicTensor<T> y = tape.value(x);
  for (auto& v : y.values()) v = v > T(0) ? v : T(0);
  return tape.record(std::move(y), {x}, [x](BasicTape<T>& t, Var out) {
    const auto& g = t.grad(out);
    const auto& xv = t.value(x);
    auto& gx = t.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (xv[i] > T(0)) gx[i] += g[i];
    }
  });
}

template <typename T>
Var tanh(BasicTape<T>& tape, Var x) {
  BasicTensor<T> y = tape.value(x);
  for (auto& v : y.values()) v = std::tanh(v);
  return tape.record(std::move(y), {x}, [x](BasicTape<T>& t, Var out) {
    const auto& g = t.grad(out);
    const auto& yv = t.value(out);
    auto& gx = t.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (T(1) - yv[i] * yv[i]);
  });
}

// Sum of every element, returned as a 1-element tensor.
template <typename T>
Var sum(BasicTape<T>& tape, Var x) {
  const auto& xv = tape.value(x);
  double s = 0.0;
  for (T v : xv.values()) s += static_cast<double>(v);
  return tape.record(BasicTensor<T>({1}, {static_cast<T>(s)}), {x}, [x](BasicTape<T>& t, Var out) {
    const T g = t.grad(out)[0];
    for (auto& v : t.grad(x).values()) v += g;
  });
}

// Sum of elementwise products with a constant weight tensor; lets gradient
// checks probe every output element with a distinct sensitivity.
template <typename T>
Var weighted_sum(BasicTape<T>& tape, Var x, const BasicTensor<T>& weights) {
  const auto& xv = tape.value(x);
  detail::require<T>(xv.size() == weights.size(), "weighted_sum", "size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) s += static_cast<double>(xv[i]) * static_cast<double>(weights[i]);
  return tape.record(BasicTensor<T>({1}, {static_cast<T>(s)}), {x}, [x, weights](BasicTape<T>& t, Var out) {
    const T g = t.grad(out)[0];
    auto& gx = t.grad(x);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g * weights[i];
  });
}

// Per-row normalization to zero mean and unit variance, then gain * xhat + bias.
template <typename T>
Var layer_norm(BasicTape<T>& tape, Var x, Var gain, Var bias, T eps = T(1e-5)) {
  const auto& xv = tape.value(x);
  const int n = xv.rows(), d = xv.cols();
  detail::require<T>(d >= 1, "layer_norm", "empty rows");
  detail::require<T>(eps > T(0), "layer_norm", "eps must be positive");
  const auto& gv = tape.value(gain);
  const auto& bv = tape.value(bias);
  detail::require<T>(static_cast<int>(gv.size()) == d && static_cast<int>(bv.size()) == d, "layer_norm",
                     "affine parameters must have length " + std::to_string(d));
  BasicTensor<T> y(xv.shape());
  BasicTensor<T> xhat(xv.shape());
  std::vector<T> inv_std(n);
  for (int r = 0; r < n; ++r) {
    auto xr = xv.row(r);
    T mean = T(0);
    for (T v : xr) mean += v;
    mean /= T(d);
    T var = T(0);
    for (T v : xr) var += (v - mean) * (v - mean);
    var /= T(d);
    const T inv = T(1) / std::sqrt(var + eps);
    inv_std[r] = inv;
    auto hr = xhat.row(r);
    auto yr = y.row(r);
    for (int j = 0; j < d; ++j) {
      hr[j] = (xr[j] - mean) * inv;
      yr[j] = gv[j] * hr[j] + bv[j];
    }
  }
  detail::check_finite(y, "layer_norm");
  return tape.record(std::move(y), {x, gain, bias},
                     [x, gain, bias, n, d, xhat = std::move(xhat), inv_std = std::move(inv_std)](BasicTape<T>& t, Var out) {
                       const auto& g = t.grad(out);
                       const auto& gv = t.value(gain);
                       if (t.requires_grad(gain) || t.requires_grad(bias)) {
                         for (int r = 0; r < n; ++r) {
                           auto gr = g.row(r);
                           auto hr = xhat.row(r);
                           if (t.requires_grad(gain)) {
                             auto& gg = t.grad(gain);
                             for (int j = 0; j < d; ++j) gg[j] += gr[j] * hr[j];
                           }
                           if (t.requires_grad(bias)) {
                             auto& gb = t.grad(bias);
                             for (int j = 0; j < d; ++j) gb[j] += gr[j];
                           }
                         }
                       }
                       if (!t.requires_grad(x)) return;
                       auto& gx = t.grad(x);
                       std::vector<T> dh(d);
                       for (int r = 0; r < n; ++r) {
                         auto gr = g.row(r);
                         auto hr = xhat.row(r);
                         T sum_dh = T(0), sum_dh_h = T(0);
                         for (int j = 0; j < d; ++j) {
                           dh[j] = gr[j] * gv[j];
                           sum_dh += dh[j];
                           sum_dh_h += dh[j] * hr[j];
                         }
                         auto gxr = gx.row(r);
                         const T k = inv_std[r] / T(d);
                         for (int j = 0; j < d; ++j) gxr[j] += k * (T(d) * dh[j] - sum_dh - hr[j] * sum_dh_h);
                       }
                     });
}

// lambda = sigmoid([x, y] W_g + b_g); out = lambda * x + (1 - lambda) * y.
template <typename T>
Var gate(BasicTape<T>& tape, Var x, Var y, Var wg, Var bg) {
  const auto& xv = tape.value(x);
  const auto& yv = tape.value(y);
  const int n = xv.rows(), d = xv.cols();
  detail::require<T>(xv.same_shape(yv), "gate", xv.shape_string() + " vs " + yv.shape_string());
  const auto& wv = tape.value(wg);
  detail::require<T>(wv.rank() == 2 && wv.rows() == 2 * d && wv.cols() == d, "gate",
                     "W_g must be [" + std::to_string(2 * d) + "," + std::to_string(d) + "], got " + wv.shape_string());
  detail::require<T>(static_cast<int>(tape.value(bg).size()) == d, "gate", "b_g length");

  BasicTensor<T> xy = BasicTensor<T>::matrix(n, 2 * d);
  for (int r = 0; r < n; ++r) {
    std::copy(xv.row(r).begin(), xv.row(r).end(), xy.row(r).begin());
    std::copy(yv.row(r).begin(), yv.row(r).end(), xy.row(r).begin() + d);
  }
  BasicTensor<T> lam = BasicTensor<T>::matrix(n, d);
  kernels::affine_rows(xy.data(), n, 2 * d, wv.data(), d, tape.value(bg).data(), lam.data());
  BasicTensor<T> out(xv.shape());
  for (std::size_t i = 0; i < lam.size(); ++i) {
    lam[i] = detail::sigmoid(lam[i]);
    out[i] = lam[i] * xv[i] + (T(1) - lam[i]) * yv[i];
  }
  detail::check_finite(out, "gate");
  return tape.record(std::move(out), {x, y, wg, bg},
                     [x, y, wg, bg, n, d, xy = std::move(xy), lam = std::move(lam)](BasicTape<T>& t, Var o) {
                       const auto& g = t.grad(o);
                       const auto& xv = t.value(x);
                       const auto& yv = t.value(y);
                       BasicTensor<T> dz = BasicTensor<T>::matrix(n, d);
                       for (std::size_t i = 0; i < dz.size(); ++i) {
                         dz[i] = g[i] * (xv[i] - yv[i]) * lam[i] * (T(1) - lam[i]);
                       }
                       if (t.requires_grad(x)) {
                         auto& gx = t.grad(x);
                         for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i] * lam[i];
                       }
                       if (t.requires_grad(y)) {
                         auto& gy = t.grad(y);
                         for (std::size_t i = 0; i < gy.size(); ++i) gy[i] += g[i] * (T(1) - lam[i]);
                       }
                       if (t.requires_grad(x) || t.requires_grad(y)) {
                         BasicTensor<T> dxy = BasicTensor<T>::matrix(n, 2 * d);
                         kernels::accumulate_input_grad(dz.data(), n, d, t.value(wg).data(), 2 * d, dxy.data());
                         for (int r = 0; r < n; ++r) {
                           auto src = dxy.row(r);
                           if (t.requires_grad(x)) kernels::axpy(T(1), src.data(), t.grad(x).row(r).data(), d);
                           if (t.requires_grad(y)) kernels::axpy(T(1), src.data() + d, t.grad(y).row(r).data(), d);
                         }
                       }
                       if (t.requires_grad(wg)) {
                         kernels::accumulate_outer(xy.data(), n, 2 * d, dz.data(), d, t.grad(wg).data());
                       }
                       if (t.requires_grad(bg)) {
                         auto& gb = t.grad(bg);
                         for (int r = 0; r < n; ++r) kernels::axpy(T(1), dz.row(r).data(), gb.data(), d);
                       }
                     });
}

// One contiguous run of query tokens together with the memory rows that
// precede it. Within a segment, position p = mem_len + i for token i; a query
// at p attends to positions max(0, p - span) .. p.
struct AttentionSegment {
  int token_begin = 0;
  int token_len = 0;
  int mem_begin = 0;
  int mem_len = 0;
};

// Dense attention weights recorded for inspection: weights[h][n] holds one
// entry per position 0..p of query n's segment (zero outside the window).
template <typename T>
struct AttentionProbe {
  std::vector<std::vector<std::vector<T>>> weights;
};

// Multi-head scaled dot-product attention with a relative-position key term:
//   score(p, k) = q_p . (key_k + R[min(p - k, R.rows - 1)]) / sqrt(d_k)
// Keys and values come from the memory rows (mem_k/mem_v, may be invalid when
// no segment carries memory) followed by the segment's own tokens. Returns
// the concatenated per-head context, shape [N, d].
template <typename T>
Var relative_attention(BasicTape<T>& tape, Var q, Var k, Var v, Var mem_k, Var mem_v, Var rel,
                       const std::vector<AttentionSegment>& segments, int n_heads, int span,
                       AttentionProbe<T>* probe = nullptr) {
  const auto& qv = tape.value(q);
  const int n = qv.rows(), d = qv.cols();
  detail::require<T>(n > 0, "attention", "empty window");
  detail::require<T>(n_heads > 0 && d % n_heads == 0, "attention",
                     "embedding " + std::to_string(d) + " not divisible by " + std::to_string(n_heads) + " heads");
  detail::require<T>(tape.value(k).same_shape(qv) && tape.value(v).same_shape(qv), "attention", "q/k/v shapes differ");
  const auto& rv = tape.value(rel);
  detail::require<T>(rv.rank() == 2 && rv.cols() == d && rv.rows() >= 1, "attention", "relative table " + rv.shape_string());
  const bool has_mem = mem_k.valid();
  const int dk = d / n_heads;
  const T scale = T(1) / std::sqrt(T(dk));
  const int rel_rows = rv.rows();

  struct QueryPlan {
    int token = 0;
    int seg = 0;
    int pos = 0;
    int first = 0;  // first attended position
    int prob_offset = 0;
  };
  std::vector<QueryPlan> plan;
  plan.reserve(n);
  int total = 0;
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    const auto& sg = segments[s];
    detail::require<T>(sg.mem_len == 0 || has_mem, "attention", "segment has memory but no memory keys");
    for (int i = 0; i < sg.token_len; ++i) {
      QueryPlan qp;
      qp.token = sg.token_begin + i;
      qp.seg = s;
      qp.pos = sg.mem_len + i;
      qp.first = std::max(0, qp.pos - span);
      qp.prob_offset = total;
      total += (qp.pos - qp.first + 1) * n_heads;
      plan.push_back(qp);
    }
  }
  detail::require<T>(static_cast<int>(plan.size()) == n, "attention", "segments do not cover the token rows");

  const auto* mk = has_mem ? &tape.value(mem_k) : nullptr;
  const auto* mv = has_mem ? &tape.value(mem_v) : nullptr;
  const auto& kv = tape.value(k);
  const auto& vv = tape.value(v);
  auto key_row = [&](const QueryPlan& qp, int p) -> const T* {
    const auto& sg = segments[qp.seg];
    if (p < sg.mem_len) return mk->data() + static_cast<std::size_t>(sg.mem_begin + p) * d;
    return kv.data() + static_cast<std::size_t>(sg.token_begin + p - sg.mem_len) * d;
  };
  auto value_row = [&](const QueryPlan& qp, int p) -> const T* {
    const auto& sg = segments[qp.seg];
    if (p < sg.mem_len) return mv->data() + static_cast<std::size_t>(sg.mem_begin + p) * d;
    return vv.data() + static_cast<std::size_t>(sg.token_begin + p - sg.mem_len) * d;
  };

  std::vector<T> probs(total);
  BasicTensor<T> out = BasicTensor<T>::matrix(n, d);
  if (probe != nullptr) probe->weights.assign(n_heads, std::vector<std::vector<T>>(n));
  for (const auto& qp : plan) {
    const int nk = qp.pos - qp.first + 1;
    const T* qrow = qv.data() + static_cast<std::size_t>(qp.token) * d;
    for (int h = 0; h < n_heads; ++h) {
      T* pr = probs.data() + qp.prob_offset + h * nk;
      const int c0 = h * dk;
      T mx = -std::numeric_limits<T>::infinity();
      for (int j = 0; j < nk; ++j) {
        const int p = qp.first + j;
        const T* krow = key_row(qp, p);
        const T* rrow = rv.data() + static_cast<std::size_t>(std::min(qp.pos - p, rel_rows - 1)) * d;
        const T s = (kernels::dot(qrow + c0, krow + c0, dk) + kernels::dot(qrow + c0, rrow + c0, dk)) * scale;
        pr[j] = s;
        mx = std::max(mx, s);
      }
      T z = T(0);
      for (int j = 0; j < nk; ++j) {
        pr[j] = std::exp(pr[j] - mx);
        z += pr[j];
      }
      const T inv = T(1) / z;
      T* orow = out.data() + static_cast<std::size_t>(qp.token) * d + c0;
      for (int j = 0; j < nk; ++j) {
        pr[j] *= inv;
        kernels::axpy(pr[j], value_row(qp, qp.first + j) + c0, orow, dk);
      }
      if (probe != nullptr) {
        auto& row = probe->weights[h][qp.token];
        row.assign(qp.pos + 1, T(0));
        for (int j = 0; j < nk; ++j) row[qp.first + j] = pr[j];
      }
    }
  }
  detail::check_finite(out, "attention");

  return tape.record(
      std::move(out), {q, k, v, has_mem ? mem_k : q, has_mem ? mem_v : q, rel},
      [=, plan = std::move(plan), probs = std::move(probs)](BasicTape<T>& t, Var o) {
        const auto& g = t.grad(o);
        const auto& qv = t.value(q);
        const auto& kv = t.value(k);
        const auto& vv = t.value(v);
        const auto& rv = t.value(rel);
        const auto* mk = has_mem ? &t.value(mem_k) : nullptr;
        const auto* mv = has_mem ? &t.value(mem_v) : nullptr;
        T* gq = t.requires_grad(q) ? t.grad(q).data() : nullptr;
        T* gk = t.requires_grad(k) ? t.grad(k).data() : nullptr;
        T* gv = t.requires_grad(v) ? t.grad(v).data() : nullptr;
        T* gmk = has_mem && t.requires_grad(mem_k) ? t.grad(mem_k).data() : nullptr;
        T* gmv = has_mem && t.requires_grad(mem_v) ? t.grad(mem_v).data() : nullptr;
        T* gr = t.requires_grad(rel) ? t.grad(rel).data() : nullptr;
        std::vector<T> dprob;
        for (const auto& qp : plan) {
          const auto& sg = segments[qp.seg];
          const int nk = qp.pos - qp.first + 1;
          dprob.resize(nk);
          const T* qrow = qv.data() + static_cast<std::size_t>(qp.token) * d;
          const T* grow = g.data() + static_cast<std::size_t>(qp.token) * d;
          for (int h = 0; h < n_heads; ++h) {
            const int c0 = h * dk;
            const T* pr = probs.data() + qp.prob_offset + h * nk;
            T weighted = T(0);
            for (int j = 0; j < nk; ++j) {
              const int p = qp.first + j;
              const bool in_mem = p < sg.mem_len;
              const std::size_t row = static_cast<std::size_t>(in_mem ? sg.mem_begin + p : sg.token_begin + p - sg.mem_len);
              const T* vrow = (in_mem ? mv->data() : vv.data()) + row * d;
              dprob[j] = kernels::dot(grow + c0, vrow + c0, dk);
              weighted += pr[j] * dprob[j];
              T* gvt = in_mem ? gmv : gv;
              if (gvt != nullptr) kernels::axpy(pr[j], grow + c0, gvt + row * d + c0, dk);
            }
            for (int j = 0; j < nk; ++j) {
              const int p = qp.first + j;
              const T ds = pr[j] * (dprob[j] - weighted) * scale;
              if (ds == T(0)) continue;
              const bool in_mem = p < sg.mem_len;
              const std::size_t row = static_cast<std::size_t>(in_mem ? sg.mem_begin + p : sg.token_begin + p - sg.mem_len);
              const T* krow = (in_mem ? mk->data() : kv.data()) + row * d;
              const std::size_t rrow = static_cast<std::size_t>(std::min(qp.pos - p, rv.rows() - 1)) * d;
              if (gq != nullptr) {
                T* gqr = gq + static_cast<std::size_t>(qp.token) * d + c0;
                kernels::axpy(ds, krow + c0, gqr, dk);
                kernels::axpy(ds, rv.data() + rrow + c0, gqr, dk);
              }
              T* gkt = in_mem ? gmk : gk;
              if (gkt != nullptr) kernels::axpy(ds, qrow + c0, gkt + row * d + c0, dk);
              if (gr != nullptr) kernels::axpy(ds, qrow + c0, gr + rrow + c0, dk);
            }
          }
        }
      });
}

// Attention block parameters as tape handles: projections are [d, d], the
// relative table is [rows, d] and indexed by clipped offset.
struct AttentionParams {
  Var wq, wk, wv, wo, bo, rel;
};

// Causal multi-head attention over a single window with relative positions
// and an output projection. Offsets larger than the table are clipped.
template <typename T>
Var multihead_attention_rel(BasicTape<T>& tape, Var window, int n_heads, const AttentionParams& p,
                            AttentionProbe<T>* probe = nullptr) {
  const int len = tape.value(window).rows();
  if (tape.value(window).empty() || len == 0) throw ConfigError("attention: empty window");
  Var q = linear(tape, window, p.wq);
  Var k = linear(tape, window, p.wk);
  Var v = linear(tape, window, p.wv);
  std::vector<AttentionSegment> seg{{0, len, 0, 0}};
  Var ctx = relative_attention(tape, q, k, v, Var{}, Var{}, p.rel, seg, n_heads, len, probe);
  return linear(tape, ctx, p.wo, p.bo);
}

}  // namespace gtppo::netcore
