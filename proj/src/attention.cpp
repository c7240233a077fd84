#include "sgl/attention.hpp"

#include <cmath>

namespace sgl {

namespace {

Tensor apply_key_mask(Tensor logits, const MaskBias& mask) {
  if (mask.empty()) return logits;
  if (static_cast<int64_t>(mask.size()) != logits.dim(1))
    fail("shape_error", "attention mask has " + std::to_string(mask.size()) +
                            " entries for logits " + shape_str(logits.shape()));
  return add(logits, Tensor::from({logits.dim(1)}, mask));
}

}  // namespace

Tensor scaled_dot_attention(Tensor q, Tensor k, Tensor v,
                            const MaskBias& key_mask) {
  if (q.rank() != 2 || k.rank() != 2 || v.rank() != 2 || q.dim(1) != k.dim(1) ||
      k.dim(0) != v.dim(0))
    fail("shape_error", "scaled_dot_attention: Q " + shape_str(q.shape()) +
                            " K " + shape_str(k.shape()) + " V " +
                            shape_str(v.shape()));
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(q.dim(1)));
  Tensor logits = scale(matmul(q, transpose(k)), inv_sqrt_d);
  Tensor weights = softmax_temp(apply_key_mask(logits, key_mask), 1.0);
  return matmul(weights, v);
}

MhaParams MhaParams::create(ParamStore& params, const std::string& prefix,
                            int64_t d_h, int heads, Rng& rng) {
  if (heads < 1 || d_h % heads != 0)
    fail("config_error", "multi-head attention: d_h=" + std::to_string(d_h) +
                             " not divisible by heads=" + std::to_string(heads));
  MhaParams p;
  const int64_t d_head = d_h / heads;
  for (int h = 0; h < heads; ++h) {
    const std::string hp = prefix + ".h" + std::to_string(h);
    p.heads.push_back({params.xavier(hp + ".wq", d_h, d_head, rng),
                       params.xavier(hp + ".wk", d_h, d_head, rng),
                       params.xavier(hp + ".wv", d_h, d_head, rng)});
  }
  p.wo = params.xavier(prefix + ".wo", d_h, d_h, rng);
  return p;
}

Tensor multi_head_attention(const MhaParams& p, Tensor q, Tensor k, Tensor v,
                            const MaskBias& key_mask) {
  std::vector<Tensor> heads;
  heads.reserve(p.heads.size());
  for (const MhaParams::Head& h : p.heads)
    heads.push_back(scaled_dot_attention(matmul(q, h.wq), matmul(k, h.wk),
                                         matmul(v, h.wv), key_mask));
  Tensor cat = heads.size() == 1 ? heads[0] : concat(heads, 1);
  return matmul(cat, p.wo);
}

FfnParams FfnParams::create(ParamStore& params, const std::string& prefix,
                            int64_t d_in, int64_t hidden, int64_t d_out,
                            Rng& rng) {
  FfnParams p;
  p.w1 = params.xavier(prefix + ".w1", d_in, hidden, rng);
  p.b1 = params.zeros(prefix + ".b1", {hidden});
  p.w2 = params.xavier(prefix + ".w2", hidden, d_out, rng);
  p.b2 = params.zeros(prefix + ".b2", {d_out});
  return p;
}

Tensor ffn_forward(const FfnParams& p, Tensor x) {
  return add(matmul(relu(add(matmul(x, p.w1), p.b1)), p.w2), p.b2);
}

AttnBlockParams AttnBlockParams::create(ParamStore& params,
                                        const std::string& prefix, int64_t d_h,
                                        int heads, int64_t ffn_hidden,
                                        Rng& rng) {
  AttnBlockParams p;
  p.mha = MhaParams::create(params, prefix + ".mha", d_h, heads, rng);
  p.ffn = FfnParams::create(params, prefix + ".ffn", d_h, ffn_hidden, d_h, rng);
  p.ln1_g = params.full(prefix + ".ln1.g", {d_h}, 1.0);
  p.ln1_b = params.zeros(prefix + ".ln1.b", {d_h});
  p.ln2_g = params.full(prefix + ".ln2.g", {d_h}, 1.0);
  p.ln2_b = params.zeros(prefix + ".ln2.b", {d_h});
  return p;
}

namespace {

Tensor block_core(const AttnBlockParams& p, Tensor queries, Tensor kv,
                  const MaskBias& mask) {
  Tensor attended = multi_head_attention(p.mha, queries, kv, kv, mask);
  Tensor x1 = layer_norm(add(queries, attended), p.ln1_g, p.ln1_b);
  Tensor x2 = layer_norm(add(x1, ffn_forward(p.ffn, x1)), p.ln2_g, p.ln2_b);
  return x2;
}

}  // namespace

Tensor self_attention_block(const AttnBlockParams& p, Tensor x,
                            const MaskBias& mask) {
  return block_core(p, x, x, mask);
}

Tensor guided_attention_block(const AttnBlockParams& p, Tensor x, Tensor y,
                              const MaskBias& y_mask) {
  return block_core(p, x, y, y_mask);
}

AttnFlatParams AttnFlatParams::create(ParamStore& params,
                                      const std::string& prefix, int64_t d_h,
                                      Rng& rng) {
  AttnFlatParams p;
  p.w1 = params.xavier(prefix + ".w1", d_h, d_h, rng);
  p.b1 = params.zeros(prefix + ".b1", {d_h});
  p.w2 = params.xavier(prefix + ".w2", d_h, 1, rng);
  p.b2 = params.zeros(prefix + ".b2", {1});
  return p;
}

Tensor attention_flat_weights(const AttnFlatParams& p, Tensor x,
                              const MaskBias& mask) {
  Tensor logits = transpose(add(matmul(relu(add(matmul(x, p.w1), p.b1)), p.w2),
                                p.b2));  // [1 x m]
  return softmax_temp(apply_key_mask(logits, mask), 1.0);
}

Tensor attention_flat(const AttnFlatParams& p, Tensor x, const MaskBias& mask) {
  if (x.rank() != 2 || x.dim(0) < 1)
    fail("shape_error", "attention_flat: input " + shape_str(x.shape()));
  return matmul(attention_flat_weights(p, x, mask), x);
}

NodeEmbedParams NodeEmbedParams::create(ParamStore& params,
                                        const std::string& prefix, int64_t d_h,
                                        int heads, int64_t ffn_hidden,
                                        Rng& rng) {
  NodeEmbedParams p;
  p.sa_v = AttnBlockParams::create(params, prefix + ".sa_v", d_h, heads, ffn_hidden, rng);
  p.sa_q = AttnBlockParams::create(params, prefix + ".sa_q", d_h, heads, ffn_hidden, rng);
  p.ga = AttnBlockParams::create(params, prefix + ".ga", d_h, heads, ffn_hidden, rng);
  p.af_v = AttnFlatParams::create(params, prefix + ".af_v", d_h, rng);
  p.af_q = AttnFlatParams::create(params, prefix + ".af_q", d_h, rng);
  p.head_v = FfnParams::create(params, prefix + ".head_v", d_h, ffn_hidden, d_h, rng);
  p.head_q = FfnParams::create(params, prefix + ".head_q", d_h, ffn_hidden, d_h, rng);
  return p;
}

Tensor node_visual_stream(const NodeEmbedParams& p, Tensor m_v) {
  return self_attention_block(p.sa_v, m_v);
}

Tensor node_fuse(const NodeEmbedParams& p, Tensor z_v, Tensor m_q,
                 const MaskBias& q_mask) {
  Tensor z_q = self_attention_block(p.sa_q, m_q, q_mask);
  Tensor z_v_guided = guided_attention_block(p.ga, z_v, z_q, q_mask);
  Tensor flat_v = ffn_forward(p.head_v, attention_flat(p.af_v, z_v_guided));
  Tensor flat_q = ffn_forward(p.head_q, attention_flat(p.af_q, z_q, q_mask));
  return add(flat_v, flat_q);
}

Tensor embed_node(const NodeEmbedParams& p, Tensor m_v, Tensor m_q,
                  const MaskBias& q_mask) {
  return node_fuse(p, node_visual_stream(p, m_v), m_q, q_mask);
}

}  // namespace sgl
