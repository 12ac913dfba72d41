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

#ifndef EEPROF_SHA256_H_
#define EEPROF_SHA256_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace eeprof {

using Digest = std::array<uint8_t, 32>;

// Thin wrapper over OpenSSL's SHA-256.
Digest Sha256(std::string_view bytes);
std::string ToHex(const Digest& digest);

}  // namespace eeprof

#endif  // EEPROF_SHA256_H_
