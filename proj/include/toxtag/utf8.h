// Copyright 2026 The Toxtag Authors.
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

#ifndef TOXTAG_UTF8_H_
#define TOXTAG_UTF8_H_

#include <string>
#include <string_view>

namespace toxtag::utf8 {

// Throws ValidationError on malformed input.
std::u32string decode(std::string_view text);

std::string encode(std::u32string_view code_points);
void append(char32_t cp, std::string& out);

}  // namespace toxtag::utf8

#endif  // TOXTAG_UTF8_H_
