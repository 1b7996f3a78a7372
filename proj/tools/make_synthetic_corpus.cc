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

// Regenerates the bundled synthetic corpus:
//   make_synthetic_corpus <out_dir>
// writes <out_dir>/train and <out_dir>/heldout.

#include <iostream>

#include "synthetic.h"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_synthetic_corpus <out_dir>\n";
    return 1;
  }
  const std::filesystem::path out = argv[1];
  toxtag::testing::write_corpus(toxtag::testing::synthetic_train(), out / "train");
  toxtag::testing::write_corpus(toxtag::testing::synthetic_heldout(), out / "heldout");
  return 0;
}
