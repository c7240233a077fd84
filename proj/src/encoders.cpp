#include "sgl/encoders.hpp"

#include <algorithm>

#include "sgl/vocab.hpp"

namespace sgl {

TokenSequence TokenSequence::make(std::vector<int> raw, int max_len) {
  if (static_cast<int>(raw.size()) > max_len)
    raw.resize(static_cast<size_t>(max_len));
  raw.resize(static_cast<size_t>(max_len), Vocab::kPad);
  return TokenSequence{std::move(raw)};
}

int TokenSequence::true_length() const {
  int n = 0;
  for (int id : ids) {
    if (id == Vocab::kPad) break;
    ++n;
  }
  return n;
}

LstmParams LstmParams::create(ParamStore& params, const std::string& prefix,
                              int64_t in_dim, int64_t hidden, Rng& rng) {
  LstmParams p;
  p.wxi = params.xavier(prefix + ".wxi", in_dim, hidden, rng);
  p.whi = params.xavier(prefix + ".whi", hidden, hidden, rng);
  p.bi = params.zeros(prefix + ".bi", {hidden});
  p.wxf = params.xavier(prefix + ".wxf", in_dim, hidden, rng);
  p.whf = params.xavier(prefix + ".whf", hidden, hidden, rng);
  p.bf = params.zeros(prefix + ".bf", {hidden});
  p.wxo = params.xavier(prefix + ".wxo", in_dim, hidden, rng);
  p.who = params.xavier(prefix + ".who", hidden, hidden, rng);
  p.bo = params.zeros(prefix + ".bo", {hidden});
  p.wxg = params.xavier(prefix + ".wxg", in_dim, hidden, rng);
  p.whg = params.xavier(prefix + ".whg", hidden, hidden, rng);
  p.bg = params.zeros(prefix + ".bg", {hidden});
  return p;
}

LstmState LstmState::zero(int64_t batch, int64_t d) {
  return {Tensor::zeros({batch, d}), Tensor::zeros({batch, d})};
}

LstmState lstm_step(const LstmParams& p, Tensor x, const LstmState& s) {
  Tensor i = sigmoid(add(add(matmul(x, p.wxi), matmul(s.h, p.whi)), p.bi));
  Tensor f = sigmoid(add(add(matmul(x, p.wxf), matmul(s.h, p.whf)), p.bf));
  Tensor o = sigmoid(add(add(matmul(x, p.wxo), matmul(s.h, p.who)), p.bo));
  Tensor g = tanh(add(add(matmul(x, p.wxg), matmul(s.h, p.whg)), p.bg));
  Tensor c = add(mul(f, s.c), mul(i, g));
  Tensor h = mul(o, tanh(c));
  return {h, c};
}

SeqEncoder::SeqEncoder(ParamStore& params, const std::string& prefix,
                       int64_t vocab, int64_t d_h, Rng& rng)
    : d_h_(d_h) {
  embedding_ = params.uniform(prefix + ".embedding", {vocab, d_h}, -0.08, 0.08, rng);
  lstm_ = LstmParams::create(params, prefix + ".lstm", d_h, d_h, rng);
}

EncodedSeq SeqEncoder::encode_states(const TokenSequence& seq,
                                     int max_len) const {
  TokenSequence padded = TokenSequence::make(seq.ids, max_len);
  const int len = padded.true_length();
  if (len == 0) fail("contract_error", "encode_states: empty sequence");
  LstmState s = LstmState::zero(1, d_h_);
  std::vector<Tensor> rows;
  rows.reserve(static_cast<size_t>(max_len));
  for (int l = 0; l < len; ++l) {
    Tensor x = embedding_lookup(embedding_, {padded.ids[static_cast<size_t>(l)]});
    s = lstm_step(lstm_, x, s);
    rows.push_back(s.h);
  }
  if (len < max_len) rows.push_back(Tensor::zeros({max_len - len, d_h_}));
  EncodedSeq out;
  out.states = rows.size() == 1 ? rows[0] : concat(rows, 0);
  out.len = len;
  out.mask_bias.assign(static_cast<size_t>(max_len), 0.0);
  for (int l = len; l < max_len; ++l)
    out.mask_bias[static_cast<size_t>(l)] = -1e9;
  return out;
}

EncodedSeq SeqEncoder::encode_history_round(const TokenSequence& q,
                                            const TokenSequence& a,
                                            int max_len) const {
  std::vector<int> joined;
  for (int id : q.ids)
    if (id != Vocab::kPad) joined.push_back(id);
  for (int id : a.ids)
    if (id != Vocab::kPad) joined.push_back(id);
  return encode_states(TokenSequence::make(std::move(joined), max_len), max_len);
}

Tensor SeqEncoder::encode_answers(
    const std::vector<TokenSequence>& candidates) const {
  if (candidates.empty()) fail("contract_error", "encode_answers: no candidates");
  const int64_t n = static_cast<int64_t>(candidates.size());
  int max_len = 0;
  for (const TokenSequence& c : candidates)
    max_len = std::max(max_len, c.true_length());
  if (max_len == 0) fail("contract_error", "encode_answers: all-empty batch");
  LstmState s = LstmState::zero(n, d_h_);
  for (int l = 0; l < max_len; ++l) {
    std::vector<int> ids(static_cast<size_t>(n), Vocab::kPad);
    Tensor active = Tensor::zeros({n});
    Tensor frozen = Tensor::zeros({n});
    for (int64_t b = 0; b < n; ++b) {
      const bool on = candidates[static_cast<size_t>(b)].true_length() > l;
      active.data()[b] = on ? 1.0 : 0.0;
      frozen.data()[b] = on ? 0.0 : 1.0;
      if (on) ids[static_cast<size_t>(b)] = candidates[static_cast<size_t>(b)].ids[static_cast<size_t>(l)];
    }
    Tensor x = embedding_lookup(embedding_, ids);
    LstmState next = lstm_step(lstm_, x, s);
    s.h = add(rows_scaled(next.h, active), rows_scaled(s.h, frozen));
    s.c = add(rows_scaled(next.c, active), rows_scaled(s.c, frozen));
  }
  return s.h;
}

Tensor project_visual(Tensor features, Tensor w_f) {
  return matmul(features, w_f);
}

DecoderParams DecoderParams::create(ParamStore& params,
                                    const std::string& prefix, int64_t d_h,
                                    int64_t vocab, Rng& rng) {
  DecoderParams p;
  p.lstm = LstmParams::create(params, prefix + ".lstm", d_h, d_h, rng);
  p.w_out = params.xavier(prefix + ".w_out", d_h, vocab, rng);
  p.b_out = params.zeros(prefix + ".b_out", {vocab});
  return p;
}

Tensor sequence_log_likelihood(const DecoderParams& dec, Tensor embedding,
                               Tensor h0,
                               const std::vector<TokenSequence>& targets) {
  const int64_t b = static_cast<int64_t>(targets.size());
  if (b == 0) fail("contract_error", "sequence_log_likelihood: empty batch");
  if (h0.rank() != 2 || (h0.dim(0) != b && h0.dim(0) != 1))
    fail("shape_error", "sequence_log_likelihood: h0 is " +
                            shape_str(h0.shape()) + " for batch " +
                            std::to_string(b));
  const int64_t vocab = embedding.dim(0);
  int max_len = 0;
  for (const TokenSequence& t : targets) {
    max_len = std::max(max_len, t.true_length());
    for (int id : t.ids)
      if (id < 0 || id >= vocab)
        fail("vocab_error", "sequence_log_likelihood: token id " +
                                std::to_string(id) + " out of range");
  }
  if (max_len == 0)
    fail("contract_error", "sequence_log_likelihood: empty target sequence");

  Tensor h_init = h0;
  if (h0.dim(0) == 1 && b > 1) {
    std::vector<Tensor> reps(static_cast<size_t>(b), h0);
    h_init = concat(reps, 0);
  }
  LstmState s{h_init, Tensor::zeros({b, h0.dim(1)})};
  Tensor acc = Tensor::zeros({b});
  for (int l = 0; l < max_len; ++l) {
    std::vector<int> prev(static_cast<size_t>(b), Vocab::kBos);
    std::vector<int> tgt(static_cast<size_t>(b), Vocab::kPad);
    Tensor mask = Tensor::zeros({b});
    for (int64_t r = 0; r < b; ++r) {
      const TokenSequence& t = targets[static_cast<size_t>(r)];
      if (l > 0)
        prev[static_cast<size_t>(r)] =
            l - 1 < t.true_length() ? t.ids[static_cast<size_t>(l - 1)] : Vocab::kPad;
      if (l < t.true_length()) {
        tgt[static_cast<size_t>(r)] = t.ids[static_cast<size_t>(l)];
        mask.data()[r] = 1.0;
      }
    }
    Tensor x = embedding_lookup(embedding, prev);
    s = lstm_step(dec.lstm, x, s);
    Tensor logits = add(matmul(s.h, dec.w_out), dec.b_out);
    Tensor logp = log(softmax_temp(logits, 1.0));
    Tensor picked = take_per_row(logp, tgt);
    acc = add(acc, mul(picked, mask));
  }
  return acc;
}

}  // namespace sgl
