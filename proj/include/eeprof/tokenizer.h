// Copyright 2026 The eeprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EEPROF_TOKENIZER_H_
#define EEPROF_TOKENIZER_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eeprof/model.h"

namespace eeprof {

// Byte-level tokenizer: byte b <-> id b. Ids from 256 up to vocab_size - 1
// (including EOS) are special and detokenize to nothing.
class ByteTokenizer {
 public:
  ByteTokenizer(int vocab_size, TokenId eos_token_id)
      : vocab_size_(vocab_size), eos_(eos_token_id) {}
  explicit ByteTokenizer(const Model& model)
      : ByteTokenizer(model.config().vocab_size, model.config().eos_token_id) {}

  std::vector<TokenId> Encode(std::string_view text) const;
  // Throws ValidationError on ids outside [0, vocab_size).
  std::string Decode(std::span<const TokenId> ids) const;

  TokenId eos() const { return eos_; }

 private:
  int vocab_size_;
  TokenId eos_;
};

}  // namespace eeprof

#endif  // EEPROF_TOKENIZER_H_
