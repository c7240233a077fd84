#pragma once

#include <string>
#include <vector>

#include "sgl/ops.hpp"
#include "sgl/params.hpp"
#include "sgl/tensor.hpp"

namespace sgl {

// Additive key mask: 0 for valid positions, -1e9 for padding. Empty means no
// masking.
using MaskBias = std::vector<double>;

Tensor scaled_dot_attention(Tensor q, Tensor k, Tensor v,
                            const MaskBias& key_mask = {});

struct MhaParams {
  struct Head {
    Tensor wq, wk, wv;  // [d_h x d_head]
  };
  std::vector<Head> heads;
  Tensor wo;  // [d_h x d_h]

  static MhaParams create(ParamStore& params, const std::string& prefix,
                          int64_t d_h, int heads, Rng& rng);
};

Tensor multi_head_attention(const MhaParams& p, Tensor q, Tensor k, Tensor v,
                            const MaskBias& key_mask = {});

struct FfnParams {
  Tensor w1, b1, w2, b2;

  static FfnParams create(ParamStore& params, const std::string& prefix,
                          int64_t d_in, int64_t hidden, int64_t d_out,
                          Rng& rng);
};

Tensor ffn_forward(const FfnParams& p, Tensor x);

// MHA + residual + layer norm, then FFN + residual + layer norm.
struct AttnBlockParams {
  MhaParams mha;
  FfnParams ffn;
  Tensor ln1_g, ln1_b, ln2_g, ln2_b;

  static AttnBlockParams create(ParamStore& params, const std::string& prefix,
                                int64_t d_h, int heads, int64_t ffn_hidden,
                                Rng& rng);
};

Tensor self_attention_block(const AttnBlockParams& p, Tensor x,
                            const MaskBias& mask = {});
// Queries from x, keys and values from y.
Tensor guided_attention_block(const AttnBlockParams& p, Tensor x, Tensor y,
                              const MaskBias& y_mask = {});

// Attentional reduction of rows to a single vector.
struct AttnFlatParams {
  Tensor w1, b1, w2, b2;  // row-wise MLP down to one logit

  static AttnFlatParams create(ParamStore& params, const std::string& prefix,
                               int64_t d_h, Rng& rng);
};

Tensor attention_flat(const AttnFlatParams& p, Tensor x,
                      const MaskBias& mask = {});

// Attention weights the reduction would use; exposed for mask diagnostics.
Tensor attention_flat_weights(const AttnFlatParams& p, Tensor x,
                              const MaskBias& mask = {});

// Joint visual-linguistic embedding of one dialog round: self attention on
// both streams, guided attention from the attended language onto the visual
// objects, attentional flattening and a feed-forward head per stream, then
// an elementwise sum.
struct NodeEmbedParams {
  AttnBlockParams sa_v, sa_q, ga;
  AttnFlatParams af_v, af_q;
  FfnParams head_v, head_q;

  static NodeEmbedParams create(ParamStore& params, const std::string& prefix,
                                int64_t d_h, int heads, int64_t ffn_hidden,
                                Rng& rng);
};

// Visual stream before language fusion; constant per dialog, so callers
// compute it once.
Tensor node_visual_stream(const NodeEmbedParams& p, Tensor m_v);

// Fuses the precomputed visual stream with one round's language features.
Tensor node_fuse(const NodeEmbedParams& p, Tensor z_v, Tensor m_q,
                 const MaskBias& q_mask);

Tensor embed_node(const NodeEmbedParams& p, Tensor m_v, Tensor m_q,
                  const MaskBias& q_mask = {});

}  // namespace sgl
