// Copyright 2026 The AssertForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "assertforge/model.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>

namespace assertforge::model {
namespace {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using Row = Eigen::Matrix<S, 1, Eigen::Dynamic>;
template <typename S>
using Col = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using CMap = Eigen::Map<const Mat<S>>;
template <typename S>
using MMap = Eigen::Map<Mat<S>>;
template <typename S>
using CRowMap = Eigen::Map<const Row<S>>;
template <typename S>
using MRowMap = Eigen::Map<Row<S>>;

constexpr double kLayerNormEps = 1e-5;

using Spec = std::pair<std::string, std::vector<int>>;

void AddAttention(std::vector<Spec>& out, const std::string& p, int d) {
  for (const char* w : {"q", "k", "v", "o"}) {
    out.push_back({p + ".w" + w, {d, d}});
    out.push_back({p + ".b" + w, {d}});
  }
}

void AddNorm(std::vector<Spec>& out, const std::string& p, int d) {
  out.push_back({p + ".g", {d}});
  out.push_back({p + ".b", {d}});
}

void AddFfn(std::vector<Spec>& out, const std::string& p, int d, int ff) {
  out.push_back({p + ".w1", {d, ff}});
  out.push_back({p + ".b1", {ff}});
  out.push_back({p + ".w2", {ff, d}});
  out.push_back({p + ".b2", {d}});
}

std::vector<Spec> TensorSpecs(const ModelConfig& c) {
  std::vector<Spec> out;
  const int d = c.d_model;
  if (c.tie_embeddings) {
    out.push_back({"embed.token", {c.vocab_size, d}});
  } else {
    out.push_back({"embed.enc_token", {c.vocab_size, d}});
    out.push_back({"embed.dec_token", {c.vocab_size, d}});
    out.push_back({"out.proj", {c.vocab_size, d}});
  }
  out.push_back({"embed.enc_pos", {c.max_len, d}});
  out.push_back({"embed.dec_pos", {c.max_len, d}});
  AddNorm(out, "enc.ln_emb", d);
  AddNorm(out, "dec.ln_emb", d);
  for (int l = 0; l < c.enc_layers; ++l) {
    const std::string p = "enc." + std::to_string(l);
    AddAttention(out, p + ".self", d);
    AddNorm(out, p + ".ln1", d);
    AddFfn(out, p + ".ffn", d, c.d_ff);
    AddNorm(out, p + ".ln2", d);
  }
  for (int l = 0; l < c.dec_layers; ++l) {
    const std::string p = "dec." + std::to_string(l);
    AddAttention(out, p + ".self", d);
    AddNorm(out, p + ".ln1", d);
    AddAttention(out, p + ".cross", d);
    AddNorm(out, p + ".ln2", d);
    AddFfn(out, p + ".ffn", d, c.d_ff);
    AddNorm(out, p + ".ln3", d);
  }
  out.push_back({"out.bias", {c.vocab_size}});
  return out;
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int ParseInt(const std::map<std::string, std::string>& kv,
             const std::string& key, int fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": '" + it->second + "'");
  }
}

double ParseDouble(const std::map<std::string, std::string>& kv,
                   const std::string& key, double fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": '" + it->second + "'");
  }
}

struct AttnIdx {
  int wq, bq, wk, bk, wv, bv, wo, bo;
};
struct NormIdx {
  int g, b;
};
struct FfnIdx {
  int w1, b1, w2, b2;
};
struct EncIdx {
  AttnIdx self;
  NormIdx ln1;
  FfnIdx ffn;
  NormIdx ln2;
};
struct DecIdx {
  AttnIdx self;
  NormIdx ln1;
  AttnIdx cross;
  NormIdx ln2;
  FfnIdx ffn;
  NormIdx ln3;
};

template <typename S>
S GeluCdf(S x) {
  return S(0.5) * (S(1) + std::erf(x * S(0.70710678118654752440)));
}

template <typename S>
S GeluPdf(S x) {
  return S(0.39894228040143267794) * std::exp(S(-0.5) * x * x);
}

}  // namespace

// ---------------------------------------------------------------------------
// ModelConfig

void ModelConfig::Validate() const {
  auto positive = [](const char* name, int v) {
    if (v <= 0) {
      throw ConfigError(std::string(name) + " must be positive, got " +
                        std::to_string(v));
    }
  };
  positive("enc_layers", enc_layers);
  positive("dec_layers", dec_layers);
  positive("d_model", d_model);
  positive("n_heads", n_heads);
  positive("d_ff", d_ff);
  positive("max_len", max_len);
  if (vocab_size < kNumSpecials) {
    throw ConfigError("vocab_size must be at least " +
                      std::to_string(kNumSpecials));
  }
  if (d_model % n_heads != 0) {
    throw ConfigError("d_model " + std::to_string(d_model) +
                      " is not divisible by n_heads " +
                      std::to_string(n_heads));
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("dropout must lie in [0, 1)");
  }
}

std::map<std::string, std::string> ModelConfig::ToMap() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", dropout);
  return {
      {"enc_layers", std::to_string(enc_layers)},
      {"dec_layers", std::to_string(dec_layers)},
      {"d_model", std::to_string(d_model)},
      {"n_heads", std::to_string(n_heads)},
      {"d_ff", std::to_string(d_ff)},
      {"max_len", std::to_string(max_len)},
      {"vocab_size", std::to_string(vocab_size)},
      {"dropout", buf},
      {"tie_embeddings", tie_embeddings ? "1" : "0"},
  };
}

ModelConfig ModelConfig::FromMap(const std::map<std::string, std::string>& kv) {
  ModelConfig c;
  c.enc_layers = ParseInt(kv, "enc_layers", c.enc_layers);
  c.dec_layers = ParseInt(kv, "dec_layers", c.dec_layers);
  c.d_model = ParseInt(kv, "d_model", c.d_model);
  c.n_heads = ParseInt(kv, "n_heads", c.n_heads);
  c.d_ff = ParseInt(kv, "d_ff", c.d_ff);
  c.max_len = ParseInt(kv, "max_len", c.max_len);
  c.vocab_size = ParseInt(kv, "vocab_size", c.vocab_size);
  c.dropout = ParseDouble(kv, "dropout", c.dropout);
  c.tie_embeddings = ParseInt(kv, "tie_embeddings", c.tie_embeddings ? 1 : 0) != 0;
  return c;
}

// ---------------------------------------------------------------------------
// Parameters

template <typename S>
Parameters<S>::Parameters(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.Validate();
  for (auto& [name, shape] : TensorSpecs(cfg_)) {
    std::size_t n = 1;
    for (int s : shape) n *= static_cast<std::size_t>(s);
    index_[name] = static_cast<int>(tensors_.size());
    tensors_.push_back(Tensor<S>{name, shape, std::vector<S>(n, S(0))});
  }
}

template <typename S>
Parameters<S> Parameters<S>::Init(const ModelConfig& cfg, std::uint64_t seed) {
  Parameters<S> p(cfg);
  Rng rng(seed);
  for (Tensor<S>& t : p.tensors_) {
    const bool norm_gain = EndsWith(t.name, ".g");
    const bool matrix = t.shape.size() == 2;
    for (S& v : t.data) {
      if (norm_gain) {
        v = S(1);
      } else if (matrix) {
        v = static_cast<S>(rng.Normal(0.0, 0.02));
      }
    }
  }
  return p;
}

template <typename S>
int Parameters<S>::Index(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

template <typename S>
Tensor<S>& Parameters<S>::at(const std::string& name) {
  const int i = Index(name);
  if (i < 0) throw ShapeError("no tensor named " + name);
  return tensors_[static_cast<std::size_t>(i)];
}

template <typename S>
const Tensor<S>& Parameters<S>::at(const std::string& name) const {
  const int i = Index(name);
  if (i < 0) throw ShapeError("no tensor named " + name);
  return tensors_[static_cast<std::size_t>(i)];
}

template <typename S>
std::size_t Parameters<S>::NumScalars() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.data.size();
  return n;
}

template <typename S>
void Parameters<S>::SetZero() {
  for (auto& t : tensors_) std::fill(t.data.begin(), t.data.end(), S(0));
}

template <typename S>
bool Parameters<S>::AllFinite() const {
  for (const auto& t : tensors_) {
    for (S v : t.data) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Framing

std::vector<int> EncoderInput(const std::vector<int>& source, int max_len) {
  const auto keep = std::min<std::size_t>(source.size(),
                                          static_cast<std::size_t>(max_len - 1));
  std::vector<int> out(source.begin(),
                       source.begin() + static_cast<std::ptrdiff_t>(keep));
  out.push_back(kEosId);
  return out;
}

std::vector<int> DecoderInput(const std::vector<int>& target, int max_len) {
  const auto keep = std::min<std::size_t>(target.size(),
                                          static_cast<std::size_t>(max_len - 1));
  std::vector<int> out{kBosId};
  out.insert(out.end(), target.begin(),
             target.begin() + static_cast<std::ptrdiff_t>(keep));
  return out;
}

std::vector<int> DecoderLabels(const std::vector<int>& target, int max_len) {
  const auto keep = std::min<std::size_t>(target.size(),
                                          static_cast<std::size_t>(max_len - 1));
  std::vector<int> out(target.begin(),
                       target.begin() + static_cast<std::ptrdiff_t>(keep));
  out.push_back(kEosId);
  return out;
}

// ---------------------------------------------------------------------------
// Transformer internals

template <typename S>
struct Transformer<S>::Memory {
  Mat<S> enc_out;
  std::vector<Mat<S>> cross_k;
  std::vector<Mat<S>> cross_v;
};

template <typename S>
struct Transformer<S>::DecodeState {
  std::shared_ptr<const Memory> memory;
  std::vector<Mat<S>> self_k;  // max_len rows, first `pos` valid
  std::vector<Mat<S>> self_v;
  int pos = 0;
};

template <typename S>
struct Transformer<S>::Impl {
  struct NormCache {
    Mat<S> xhat;
    Col<S> rstd;
  };
  struct AttnCache {
    Mat<S> q, k, v, o;
    std::vector<Mat<S>> probs;
  };
  struct EncLayerCache {
    Mat<S> x, x1, h, act;
    AttnCache self;
    Mat<S> m1, m2;
    NormCache ln1, ln2;
  };
  struct DecLayerCache {
    Mat<S> x, x1, x2, h, act;
    AttnCache self, cross;
    Mat<S> m1, m2, m3;
    NormCache ln1, ln2, ln3;
  };
  struct EmbedCache {
    NormCache ln;
    Mat<S> mask;
  };

  const Parameters<S>& p;
  const ModelConfig& cfg;
  int enc_tok, dec_tok, out_proj, enc_pos, dec_pos, out_bias;
  NormIdx enc_ln_emb, dec_ln_emb;
  std::vector<EncIdx> enc;
  std::vector<DecIdx> dec;

  explicit Impl(const Parameters<S>& params)
      : p(params), cfg(params.config()) {
    auto idx = [&](const std::string& name) {
      const int i = p.Index(name);
      if (i < 0) throw ShapeError("parameters lack tensor " + name);
      return i;
    };
    auto attn = [&](const std::string& pre) {
      return AttnIdx{idx(pre + ".wq"), idx(pre + ".bq"), idx(pre + ".wk"),
                     idx(pre + ".bk"), idx(pre + ".wv"), idx(pre + ".bv"),
                     idx(pre + ".wo"), idx(pre + ".bo")};
    };
    auto norm = [&](const std::string& pre) {
      return NormIdx{idx(pre + ".g"), idx(pre + ".b")};
    };
    auto ffn = [&](const std::string& pre) {
      return FfnIdx{idx(pre + ".w1"), idx(pre + ".b1"), idx(pre + ".w2"),
                    idx(pre + ".b2")};
    };
    if (cfg.tie_embeddings) {
      enc_tok = dec_tok = out_proj = idx("embed.token");
    } else {
      enc_tok = idx("embed.enc_token");
      dec_tok = idx("embed.dec_token");
      out_proj = idx("out.proj");
    }
    enc_pos = idx("embed.enc_pos");
    dec_pos = idx("embed.dec_pos");
    out_bias = idx("out.bias");
    enc_ln_emb = norm("enc.ln_emb");
    dec_ln_emb = norm("dec.ln_emb");
    for (int l = 0; l < cfg.enc_layers; ++l) {
      const std::string pre = "enc." + std::to_string(l);
      enc.push_back(EncIdx{attn(pre + ".self"), norm(pre + ".ln1"),
                           ffn(pre + ".ffn"), norm(pre + ".ln2")});
    }
    for (int l = 0; l < cfg.dec_layers; ++l) {
      const std::string pre = "dec." + std::to_string(l);
      dec.push_back(DecIdx{attn(pre + ".self"), norm(pre + ".ln1"),
                           attn(pre + ".cross"), norm(pre + ".ln2"),
                           ffn(pre + ".ffn"), norm(pre + ".ln3")});
    }
  }

  // Parameter views.
  CMap<S> W(int i) const {
    const Tensor<S>& t = p.tensors()[static_cast<std::size_t>(i)];
    return CMap<S>(t.data.data(), t.shape[0], t.shape[1]);
  }
  CRowMap<S> B(int i) const {
    const Tensor<S>& t = p.tensors()[static_cast<std::size_t>(i)];
    return CRowMap<S>(t.data.data(), t.shape[0]);
  }
  static MMap<S> GW(Parameters<S>* g, int i) {
    Tensor<S>& t = g->tensors()[static_cast<std::size_t>(i)];
    return MMap<S>(t.data.data(), t.shape[0], t.shape[1]);
  }
  static MRowMap<S> GB(Parameters<S>* g, int i) {
    Tensor<S>& t = g->tensors()[static_cast<std::size_t>(i)];
    return MRowMap<S>(t.data.data(), t.shape[0]);
  }

  Mat<S> Linear(const Mat<S>& x, int w, int b) const {
    Mat<S> y = x * W(w);
    y.rowwise() += B(b);
    return y;
  }

  // Accumulates weight gradients and returns dx.
  Mat<S> LinearBack(const Mat<S>& x, int w, int b, const Mat<S>& dy,
                    Parameters<S>* g) const {
    if (g != nullptr) {
      GW(g, w).noalias() += x.transpose() * dy;
      GB(g, b) += dy.colwise().sum();
    }
    return dy * W(w).transpose();
  }

  Mat<S> Norm(const Mat<S>& x, NormIdx n, NormCache* c) const {
    const Col<S> mu = x.rowwise().mean();
    Mat<S> xc = x.colwise() - mu;
    const Col<S> var = xc.array().square().rowwise().mean();
    Col<S> rstd = (var.array() + S(kLayerNormEps)).rsqrt();
    Mat<S> xhat = xc.array().colwise() * rstd.array();
    Mat<S> y = (xhat.array().rowwise() * B(n.g).array()).rowwise() +
               B(n.b).array();
    if (c != nullptr) {
      c->xhat = std::move(xhat);
      c->rstd = std::move(rstd);
    }
    return y;
  }

  Mat<S> NormBack(const NormCache& c, NormIdx n, const Mat<S>& dy,
                  Parameters<S>* g) const {
    if (g != nullptr) {
      GB(g, n.g) += (dy.array() * c.xhat.array()).colwise().sum().matrix();
      GB(g, n.b) += dy.colwise().sum();
    }
    const Mat<S> dxhat = dy.array().rowwise() * B(n.g).array();
    const Col<S> m1 = dxhat.rowwise().mean();
    const Col<S> m2 = (dxhat.array() * c.xhat.array()).rowwise().mean();
    Mat<S> dx = (dxhat.colwise() - m1) -
                Mat<S>(c.xhat.array().colwise() * m2.array());
    return dx.array().colwise() * c.rstd.array();
  }

  void Dropout(Mat<S>& x, Rng* rng, Mat<S>* mask) const {
    if (rng == nullptr || cfg.dropout <= 0.0) {
      mask->resize(0, 0);
      return;
    }
    const S keep_scale = S(1) / S(1.0 - cfg.dropout);
    mask->resize(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < mask->size(); ++i) {
      mask->data()[i] = rng->Uniform() < cfg.dropout ? S(0) : keep_scale;
    }
    x.array() *= mask->array();
  }

  static Mat<S> DropoutBack(const Mat<S>& dy, const Mat<S>& mask) {
    if (mask.size() == 0) return dy;
    return dy.cwiseProduct(mask);
  }

  // Multi-head scaled dot-product attention over already projected q, k, v.
  // `causal` masks keys after each query (queries and keys share positions).
  Mat<S> AttendCore(const Mat<S>& q, const Mat<S>& k, const Mat<S>& v,
                    bool causal, std::vector<Mat<S>>* probs) const {
    const int heads = cfg.n_heads;
    const int dh = cfg.d_model / heads;
    const S scale = S(1) / std::sqrt(static_cast<S>(dh));
    const Eigen::Index tq = q.rows();
    const Eigen::Index tk = k.rows();
    Mat<S> o(tq, cfg.d_model);
    if (probs != nullptr) probs->resize(static_cast<std::size_t>(heads));
    for (int h = 0; h < heads; ++h) {
      Mat<S> s = (q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose()) *
                 scale;
      for (Eigen::Index i = 0; i < tq; ++i) {
        const Eigen::Index visible = causal ? std::min<Eigen::Index>(i + 1, tk) : tk;
        S mx = s(i, 0);
        for (Eigen::Index j = 1; j < visible; ++j) mx = std::max(mx, s(i, j));
        S sum = 0;
        for (Eigen::Index j = 0; j < visible; ++j) {
          s(i, j) = std::exp(s(i, j) - mx);
          sum += s(i, j);
        }
        for (Eigen::Index j = 0; j < visible; ++j) s(i, j) /= sum;
        for (Eigen::Index j = visible; j < tk; ++j) s(i, j) = S(0);
      }
      o.middleCols(h * dh, dh).noalias() = s * v.middleCols(h * dh, dh);
      if (probs != nullptr) (*probs)[static_cast<std::size_t>(h)] = std::move(s);
    }
    return o;
  }

  Mat<S> Attention(const Mat<S>& xq, const Mat<S>& xkv, bool causal,
                   const AttnIdx& a, AttnCache* c) const {
    AttnCache local;
    AttnCache& cache = c != nullptr ? *c : local;
    cache.q = Linear(xq, a.wq, a.bq);
    cache.k = Linear(xkv, a.wk, a.bk);
    cache.v = Linear(xkv, a.wv, a.bv);
    cache.o = AttendCore(cache.q, cache.k, cache.v, causal,
                         c != nullptr ? &cache.probs : nullptr);
    return Linear(cache.o, a.wo, a.bo);
  }

  // Returns (dxq, dxkv).
  std::pair<Mat<S>, Mat<S>> AttentionBack(const Mat<S>& xq, const Mat<S>& xkv,
                                          const AttnIdx& a, const AttnCache& c,
                                          const Mat<S>& dy,
                                          Parameters<S>* g) const {
    const int heads = cfg.n_heads;
    const int dh = cfg.d_model / heads;
    const S scale = S(1) / std::sqrt(static_cast<S>(dh));
    const Mat<S> d_o = LinearBack(c.o, a.wo, a.bo, dy, g);
    Mat<S> dq(c.q.rows(), c.q.cols());
    Mat<S> dk(c.k.rows(), c.k.cols());
    Mat<S> dv(c.v.rows(), c.v.cols());
    for (int h = 0; h < heads; ++h) {
      const Mat<S>& pr = c.probs[static_cast<std::size_t>(h)];
      const auto doh = d_o.middleCols(h * dh, dh);
      dv.middleCols(h * dh, dh).noalias() = pr.transpose() * doh;
      const Mat<S> dp = doh * c.v.middleCols(h * dh, dh).transpose();
      const Col<S> rowdot = (dp.array() * pr.array()).rowwise().sum();
      const Mat<S> ds =
          (pr.array() * (dp.array().colwise() - rowdot.array())) * scale;
      dq.middleCols(h * dh, dh).noalias() = ds * c.k.middleCols(h * dh, dh);
      dk.middleCols(h * dh, dh).noalias() =
          ds.transpose() * c.q.middleCols(h * dh, dh);
    }
    Mat<S> dxq = LinearBack(xq, a.wq, a.bq, dq, g);
    Mat<S> dxkv = LinearBack(xkv, a.wk, a.bk, dk, g);
    dxkv += LinearBack(xkv, a.wv, a.bv, dv, g);
    return {std::move(dxq), std::move(dxkv)};
  }

  Mat<S> FfnHidden(const Mat<S>& x, const FfnIdx& f, Mat<S>* h) const {
    *h = Linear(x, f.w1, f.b1);
    return h->unaryExpr([](S v) { return v * GeluCdf(v); });
  }

  void CheckIds(const std::vector<int>& ids, const char* what) const {
    if (ids.empty()) throw ShapeError(std::string(what) + " is empty");
    if (static_cast<int>(ids.size()) > cfg.max_len) {
      throw ShapeError(std::string(what) + " length " +
                       std::to_string(ids.size()) + " exceeds max_len " +
                       std::to_string(cfg.max_len));
    }
    for (int id : ids) {
      if (id < 0 || id >= cfg.vocab_size) {
        throw ShapeError(std::string(what) + " contains id " +
                         std::to_string(id) + " outside the vocabulary");
      }
    }
  }

  Mat<S> Embed(const std::vector<int>& ids, int tok, int pos, int offset) const {
    const CMap<S> e = W(tok);
    const CMap<S> pe = W(pos);
    Mat<S> x(static_cast<Eigen::Index>(ids.size()), cfg.d_model);
    for (std::size_t t = 0; t < ids.size(); ++t) {
      x.row(static_cast<Eigen::Index>(t)) =
          e.row(ids[t]) + pe.row(static_cast<Eigen::Index>(t) + offset);
    }
    return x;
  }

  void EmbedBack(const std::vector<int>& ids, int tok, int pos,
                 const Mat<S>& dx, Parameters<S>* g) const {
    MMap<S> ge = GW(g, tok);
    MMap<S> gp = GW(g, pos);
    for (std::size_t t = 0; t < ids.size(); ++t) {
      const auto r = static_cast<Eigen::Index>(t);
      ge.row(ids[t]) += dx.row(r);
      gp.row(r) += dx.row(r);
    }
  }

  struct Forward {
    EmbedCache enc_emb, dec_emb;
    std::vector<EncLayerCache> enc;
    std::vector<DecLayerCache> dec;
    Mat<S> enc_out, dec_out;
  };

  Mat<S> EncodeFull(const std::vector<int>& ids, Rng* rng, Forward* f) const {
    Mat<S> x = Norm(Embed(ids, enc_tok, enc_pos, 0), enc_ln_emb,
                    f ? &f->enc_emb.ln : nullptr);
    Mat<S> scratch;
    Dropout(x, rng, f ? &f->enc_emb.mask : &scratch);
    if (f) f->enc.resize(enc.size());
    for (std::size_t l = 0; l < enc.size(); ++l) {
      EncLayerCache local;
      EncLayerCache& c = f ? f->enc[l] : local;
      const EncIdx& li = enc[l];
      c.x = x;
      Mat<S> a = Attention(c.x, c.x, false, li.self, f ? &c.self : nullptr);
      Dropout(a, rng, &c.m1);
      c.x1 = Norm(c.x + a, li.ln1, &c.ln1);
      c.act = FfnHidden(c.x1, li.ffn, &c.h);
      Mat<S> ff = Linear(c.act, li.ffn.w2, li.ffn.b2);
      Dropout(ff, rng, &c.m2);
      x = Norm(c.x1 + ff, li.ln2, &c.ln2);
    }
    return x;
  }

  Mat<S> DecodeFull(const std::vector<int>& ids, const Mat<S>& memory, Rng* rng,
                    Forward* f) const {
    Mat<S> y = Norm(Embed(ids, dec_tok, dec_pos, 0), dec_ln_emb,
                    f ? &f->dec_emb.ln : nullptr);
    Mat<S> scratch;
    Dropout(y, rng, f ? &f->dec_emb.mask : &scratch);
    if (f) f->dec.resize(dec.size());
    for (std::size_t l = 0; l < dec.size(); ++l) {
      DecLayerCache local;
      DecLayerCache& c = f ? f->dec[l] : local;
      const DecIdx& li = dec[l];
      c.x = y;
      Mat<S> a = Attention(c.x, c.x, true, li.self, f ? &c.self : nullptr);
      Dropout(a, rng, &c.m1);
      c.x1 = Norm(c.x + a, li.ln1, &c.ln1);
      Mat<S> ca = Attention(c.x1, memory, false, li.cross, f ? &c.cross : nullptr);
      Dropout(ca, rng, &c.m2);
      c.x2 = Norm(c.x1 + ca, li.ln2, &c.ln2);
      c.act = FfnHidden(c.x2, li.ffn, &c.h);
      Mat<S> ff = Linear(c.act, li.ffn.w2, li.ffn.b2);
      Dropout(ff, rng, &c.m3);
      y = Norm(c.x2 + ff, li.ln3, &c.ln3);
    }
    return y;
  }

  Mat<S> Project(const Mat<S>& y) const {
    Mat<S> logits = y * W(out_proj).transpose();
    logits.rowwise() += B(out_bias);
    return logits;
  }

  Mat<S> FfnBack(const Mat<S>& x, const Mat<S>& h, const Mat<S>& act,
                 const FfnIdx& f, const Mat<S>& dy, Parameters<S>* g) const {
    const Mat<S> dact = LinearBack(act, f.w2, f.b2, dy, g);
    const Mat<S> dh = dact.binaryExpr(
        h, [](S d, S v) { return d * (GeluCdf(v) + v * GeluPdf(v)); });
    return LinearBack(x, f.w1, f.b1, dh, g);
  }

  // Backward through the decoder; returns d(memory).
  Mat<S> DecoderBack(const std::vector<int>& ids, const Mat<S>& memory,
                     const Forward& f, Mat<S> dy, Parameters<S>* g) const {
    Mat<S> dmem = Mat<S>::Zero(memory.rows(), memory.cols());
    for (std::size_t l = dec.size(); l-- > 0;) {
      const DecLayerCache& c = f.dec[l];
      const DecIdx& li = dec[l];
      const Mat<S> dr3 = NormBack(c.ln3, li.ln3, dy, g);
      Mat<S> dx2 = dr3;
      dx2 += FfnBack(c.x2, c.h, c.act, li.ffn, DropoutBack(dr3, c.m3), g);
      const Mat<S> dr2 = NormBack(c.ln2, li.ln2, dx2, g);
      Mat<S> dx1 = dr2;
      auto [dq2, dkv2] = AttentionBack(c.x1, memory, li.cross, c.cross,
                                       DropoutBack(dr2, c.m2), g);
      dx1 += dq2;
      dmem += dkv2;
      const Mat<S> dr1 = NormBack(c.ln1, li.ln1, dx1, g);
      dy = dr1;
      auto [dq1, dkv1] =
          AttentionBack(c.x, c.x, li.self, c.self, DropoutBack(dr1, c.m1), g);
      dy += dq1;
      dy += dkv1;
    }
    dy = DropoutBack(dy, f.dec_emb.mask);
    dy = NormBack(f.dec_emb.ln, dec_ln_emb, dy, g);
    EmbedBack(ids, dec_tok, dec_pos, dy, g);
    return dmem;
  }

  void EncoderBack(const std::vector<int>& ids, const Forward& f, Mat<S> dx,
                   Parameters<S>* g) const {
    for (std::size_t l = enc.size(); l-- > 0;) {
      const EncLayerCache& c = f.enc[l];
      const EncIdx& li = enc[l];
      const Mat<S> dr2 = NormBack(c.ln2, li.ln2, dx, g);
      Mat<S> dx1 = dr2;
      dx1 += FfnBack(c.x1, c.h, c.act, li.ffn, DropoutBack(dr2, c.m2), g);
      const Mat<S> dr1 = NormBack(c.ln1, li.ln1, dx1, g);
      dx = dr1;
      auto [dq, dkv] =
          AttentionBack(c.x, c.x, li.self, c.self, DropoutBack(dr1, c.m1), g);
      dx += dq;
      dx += dkv;
    }
    dx = DropoutBack(dx, f.enc_emb.mask);
    dx = NormBack(f.enc_emb.ln, enc_ln_emb, dx, g);
    EmbedBack(ids, enc_tok, enc_pos, dx, g);
  }

  // Single decoder position with cached self-attention keys and values.
  std::vector<S> Step(DecodeState& st, int token) const {
    if (st.pos >= cfg.max_len) {
      throw ShapeError("decoding past max_len " + std::to_string(cfg.max_len));
    }
    if (token < 0 || token >= cfg.vocab_size) {
      throw ShapeError("token id " + std::to_string(token) +
                       " outside the vocabulary");
    }
    const Memory& mem = *st.memory;
    Mat<S> y = Norm(Embed({token}, dec_tok, dec_pos, st.pos), dec_ln_emb, nullptr);
    const Eigen::Index n = st.pos + 1;
    for (std::size_t l = 0; l < dec.size(); ++l) {
      const DecIdx& li = dec[l];
      const Mat<S> q = Linear(y, li.self.wq, li.self.bq);
      st.self_k[l].row(st.pos) = Linear(y, li.self.wk, li.self.bk);
      st.self_v[l].row(st.pos) = Linear(y, li.self.wv, li.self.bv);
      const Mat<S> o = AttendCore(q, st.self_k[l].topRows(n),
                                  st.self_v[l].topRows(n), false, nullptr);
      const Mat<S> x1 = Norm(y + Linear(o, li.self.wo, li.self.bo), li.ln1, nullptr);
      const Mat<S> q2 = Linear(x1, li.cross.wq, li.cross.bq);
      const Mat<S> o2 = AttendCore(q2, mem.cross_k[l], mem.cross_v[l], false, nullptr);
      const Mat<S> x2 =
          Norm(x1 + Linear(o2, li.cross.wo, li.cross.bo), li.ln2, nullptr);
      Mat<S> h;
      const Mat<S> act = FfnHidden(x2, li.ffn, &h);
      y = Norm(x2 + Linear(act, li.ffn.w2, li.ffn.b2), li.ln3, nullptr);
    }
    ++st.pos;
    const Mat<S> logits = Project(y);
    const S mx = logits.maxCoeff();
    const S lse = mx + std::log((logits.array() - mx).exp().sum());
    std::vector<S> out(static_cast<std::size_t>(cfg.vocab_size));
    for (int v = 0; v < cfg.vocab_size; ++v) out[static_cast<std::size_t>(v)] = logits(0, v) - lse;
    return out;
  }
};

template <typename S>
Transformer<S>::Transformer(const Parameters<S>& params)
    : params_(params), impl_(std::make_unique<Impl>(params)) {}

template <typename S>
Transformer<S>::~Transformer() = default;

template <typename S>
Matrix<S> Transformer<S>::Logits(const std::vector<int>& enc_in,
                                 const std::vector<int>& dec_in) const {
  impl_->CheckIds(enc_in, "encoder input");
  impl_->CheckIds(dec_in, "decoder input");
  const Mat<S> memory = impl_->EncodeFull(enc_in, nullptr, nullptr);
  const Mat<S> logits =
      impl_->Project(impl_->DecodeFull(dec_in, memory, nullptr, nullptr));
  Matrix<S> out;
  out.rows = static_cast<int>(logits.rows());
  out.cols = static_cast<int>(logits.cols());
  out.data.assign(logits.data(), logits.data() + logits.size());
  return out;
}

template <typename S>
S Transformer<S>::LossAndGradient(const std::vector<int>& enc_in,
                                  const std::vector<int>& dec_in,
                                  const std::vector<int>& labels,
                                  Parameters<S>* grads, S scale,
                                  Rng* dropout_rng) const {
  const Impl& m = *impl_;
  m.CheckIds(enc_in, "encoder input");
  m.CheckIds(dec_in, "decoder input");
  if (labels.size() != dec_in.size()) {
    throw ShapeError("labels and decoder input lengths differ");
  }
  typename Impl::Forward f;
  typename Impl::Forward* fp = grads != nullptr ? &f : nullptr;
  const Mat<S> memory = m.EncodeFull(enc_in, dropout_rng, fp);
  const Mat<S> y = m.DecodeFull(dec_in, memory, dropout_rng, fp);
  Mat<S> logits = m.Project(y);
  S loss = 0;
  // Turn logits into d(loss)/d(logits) in place.
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const int label = labels[static_cast<std::size_t>(t)];
    auto row = logits.row(t);
    if (label == kPadId) {
      row.setZero();
      continue;
    }
    if (label < 0 || label >= m.cfg.vocab_size) {
      throw ShapeError("label id outside the vocabulary");
    }
    const S mx = row.maxCoeff();
    row.array() = (row.array() - mx).exp();
    const S sum = row.sum();
    loss += std::log(sum) - std::log(row(label));
    row /= sum;
    row(label) -= S(1);
    row *= scale;
  }
  if (grads == nullptr) return loss;
  if (grads->tensors().size() != params_.tensors().size()) {
    throw ShapeError("gradient buffer does not match parameters");
  }
  Impl::GW(grads, m.out_proj).noalias() += logits.transpose() * y;
  Impl::GB(grads, m.out_bias) += logits.colwise().sum();
  const Mat<S> dy = logits * m.W(m.out_proj);
  const Mat<S> dmem = m.DecoderBack(dec_in, memory, f, dy, grads);
  m.EncoderBack(enc_in, f, dmem, grads);
  return loss;
}

template <typename S>
std::shared_ptr<const typename Transformer<S>::Memory> Transformer<S>::Encode(
    const std::vector<int>& enc_in) const {
  impl_->CheckIds(enc_in, "encoder input");
  auto mem = std::make_shared<Memory>();
  mem->enc_out = impl_->EncodeFull(enc_in, nullptr, nullptr);
  for (const DecIdx& li : impl_->dec) {
    mem->cross_k.push_back(impl_->Linear(mem->enc_out, li.cross.wk, li.cross.bk));
    mem->cross_v.push_back(impl_->Linear(mem->enc_out, li.cross.wv, li.cross.bv));
  }
  return mem;
}

template <typename S>
std::shared_ptr<typename Transformer<S>::DecodeState>
Transformer<S>::StartDecoding(std::shared_ptr<const Memory> memory) const {
  auto st = std::make_shared<DecodeState>();
  st->memory = std::move(memory);
  const ModelConfig& c = params_.config();
  for (int l = 0; l < c.dec_layers; ++l) {
    st->self_k.emplace_back(c.max_len, c.d_model);
    st->self_v.emplace_back(c.max_len, c.d_model);
  }
  return st;
}

template <typename S>
std::shared_ptr<typename Transformer<S>::DecodeState> Transformer<S>::Clone(
    const DecodeState& state) const {
  return std::make_shared<DecodeState>(state);
}

template <typename S>
std::vector<S> Transformer<S>::Step(DecodeState& state, int token) const {
  return impl_->Step(state, token);
}

template <typename S>
int Transformer<S>::Position(const DecodeState& state) const {
  return state.pos;
}

// ---------------------------------------------------------------------------
// Free functions

template <typename S>
std::vector<S> ForwardBatch(const Parameters<S>& params,
                            const std::vector<std::vector<int>>& src,
                            const std::vector<std::vector<int>>& tgt) {
  if (src.size() != tgt.size()) throw ShapeError("batch sizes differ");
  if (src.empty()) return {};
  const std::size_t t_len = tgt.front().size();
  for (std::size_t b = 0; b < src.size(); ++b) {
    if (tgt[b].size() != t_len || src[b].size() != src.front().size()) {
      throw ShapeError("batch rows must be padded to a common length");
    }
  }
  const auto vocab = static_cast<std::size_t>(params.config().vocab_size);
  std::vector<S> out(src.size() * t_len * vocab, S(0));
  Transformer<S> model(params);
  auto strip = [](const std::vector<int>& row) {
    std::vector<int> r = row;
    while (!r.empty() && r.back() == kPadId) r.pop_back();
    return r;
  };
  for (std::size_t b = 0; b < src.size(); ++b) {
    const std::vector<int> s = strip(src[b]);
    const std::vector<int> t = strip(tgt[b]);
    if (t.empty()) continue;
    const Matrix<S> logits = model.Logits(s, t);
    std::copy(logits.data.begin(), logits.data.end(),
              out.begin() + static_cast<std::ptrdiff_t>(b * t_len * vocab));
  }
  return out;
}

template <typename S>
S MeanCrossEntropy(const Matrix<S>& logits, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != logits.rows) {
    throw ShapeError("labels and logits disagree on length");
  }
  S total = 0;
  int count = 0;
  for (int r = 0; r < logits.rows; ++r) {
    const int label = labels[static_cast<std::size_t>(r)];
    if (label == kPadId) continue;
    if (label < 0 || label >= logits.cols) {
      throw ShapeError("label id outside the vocabulary");
    }
    S mx = logits(r, 0);
    for (int c = 1; c < logits.cols; ++c) mx = std::max(mx, logits(r, c));
    S sum = 0;
    for (int c = 0; c < logits.cols; ++c) sum += std::exp(logits(r, c) - mx);
    total += mx + std::log(sum) - logits(r, label);
    ++count;
  }
  if (count == 0) throw ShapeError("no non-PAD target positions");
  return total / static_cast<S>(count);
}

template <typename S>
double MeanLoss(const Parameters<S>& params, const std::vector<Example>& data) {
  if (data.empty()) return 0.0;
  const Transformer<S> model(params);
  const int max_len = params.config().max_len;
  double total = 0;
  std::size_t tokens = 0;
  for (const Example& ex : data) {
    const std::vector<int> labels = DecoderLabels(ex.target, max_len);
    total += static_cast<double>(model.LossAndGradient(
        EncoderInput(ex.source, max_len), DecoderInput(ex.target, max_len),
        labels, nullptr, S(1), nullptr));
    tokens += labels.size();
  }
  return total / static_cast<double>(tokens);
}

template <typename S>
S BatchGradient(const Parameters<S>& params, const std::vector<Example>& batch,
                Parameters<S>* grads) {
  grads->SetZero();
  const int max_len = params.config().max_len;
  std::size_t tokens = 0;
  for (const Example& ex : batch) tokens += DecoderLabels(ex.target, max_len).size();
  if (tokens == 0) throw ShapeError("empty batch");
  const S scale = S(1) / static_cast<S>(tokens);
  const Transformer<S> model(params);
  S loss = 0;
  for (const Example& ex : batch) {
    loss += model.LossAndGradient(EncoderInput(ex.source, max_len),
                                  DecoderInput(ex.target, max_len),
                                  DecoderLabels(ex.target, max_len), grads,
                                  scale, nullptr);
  }
  return loss * scale;
}

template <typename S>
Parameters<S> Untie(const Parameters<S>& tied) {
  ModelConfig cfg = tied.config();
  cfg.tie_embeddings = false;
  Parameters<S> out(cfg);
  for (Tensor<S>& t : out.tensors()) {
    const bool shared = t.name == "embed.enc_token" ||
                        t.name == "embed.dec_token" || t.name == "out.proj";
    t.data = tied.at(shared ? std::string("embed.token") : t.name).data;
  }
  return out;
}

#define ASSERTFORGE_INSTANTIATE(S)                                            \
  template class Parameters<S>;                                               \
  template class Transformer<S>;                                              \
  template std::vector<S> ForwardBatch<S>(                                    \
      const Parameters<S>&, const std::vector<std::vector<int>>&,             \
      const std::vector<std::vector<int>>&);                                  \
  template S MeanCrossEntropy<S>(const Matrix<S>&, const std::vector<int>&);  \
  template double MeanLoss<S>(const Parameters<S>&,                           \
                              const std::vector<Example>&);                   \
  template S BatchGradient<S>(const Parameters<S>&,                           \
                              const std::vector<Example>&, Parameters<S>*);   \
  template Parameters<S> Untie<S>(const Parameters<S>&);

ASSERTFORGE_INSTANTIATE(float)
ASSERTFORGE_INSTANTIATE(double)

#undef ASSERTFORGE_INSTANTIATE

}  // namespace assertforge::model
