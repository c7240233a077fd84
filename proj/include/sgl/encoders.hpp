#pragma once

#include <string>
#include <vector>

#include "sgl/ops.hpp"
#include "sgl/params.hpp"
#include "sgl/tensor.hpp"

namespace sgl {

// Token ids padded or truncated to a per-type maximum. Pad id 0 only trails;
// true_length() is the number of leading non-pad tokens.
struct TokenSequence {
  std::vector<int> ids;

  static TokenSequence make(std::vector<int> raw, int max_len);
  int true_length() const;
};

struct LstmParams {
  Tensor wxi, whi, bi;
  Tensor wxf, whf, bf;
  Tensor wxo, who, bo;
  Tensor wxg, whg, bg;

  static LstmParams create(ParamStore& params, const std::string& prefix,
                           int64_t in_dim, int64_t hidden, Rng& rng);
};

struct LstmState {
  Tensor h, c;  // [B x d]
  static LstmState zero(int64_t batch, int64_t d);
};

// One gated step for a batch of rows.
LstmState lstm_step(const LstmParams& p, Tensor x, const LstmState& s);

// All hidden states of one sequence plus the additive attention mask for its
// pad positions: 0 for valid rows, -1e9 for pads. Rows past the true length
// are zero.
struct EncodedSeq {
  Tensor states;                  // [max_len x d]
  std::vector<double> mask_bias;  // max_len entries
  int len = 0;
};

class SeqEncoder {
 public:
  SeqEncoder() = default;
  SeqEncoder(ParamStore& params, const std::string& prefix, int64_t vocab,
             int64_t d_h, Rng& rng);

  // Stacked hidden states h_1..h_L for every position of the sequence.
  EncodedSeq encode_states(const TokenSequence& seq, int max_len) const;

  // Question and ground-truth answer tokens of one history round,
  // concatenated then truncated.
  EncodedSeq encode_history_round(const TokenSequence& q,
                                  const TokenSequence& a, int max_len) const;

  // Final hidden state per candidate, computed as one batch. Shorter
  // sequences carry their state unchanged through the remaining steps.
  Tensor encode_answers(const std::vector<TokenSequence>& candidates) const;

  const Tensor& embedding() const { return embedding_; }
  const LstmParams& lstm() const { return lstm_; }
  int64_t d_h() const { return d_h_; }

 private:
  Tensor embedding_;  // [vocab x d]
  LstmParams lstm_;
  int64_t d_h_ = 0;
};

// Linear projection of object features into the model dimension.
Tensor project_visual(Tensor features, Tensor w_f);

// Autoregressive scorer used by the generative objectives: an LSTM whose
// initial hidden state is the reasoning output, plus a vocab projection.
struct DecoderParams {
  LstmParams lstm;
  Tensor w_out, b_out;

  static DecoderParams create(ParamStore& params, const std::string& prefix,
                              int64_t d_h, int64_t vocab, Rng& rng);
};

// Teacher-forced sum of log p(w_l | w_<l, h0) per batch row -> {B}. Row b
// scores targets[b]; contributions past each row's true length are masked
// out.
Tensor sequence_log_likelihood(const DecoderParams& dec, Tensor embedding,
                               Tensor h0,
                               const std::vector<TokenSequence>& targets);

}  // namespace sgl
