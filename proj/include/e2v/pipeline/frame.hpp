// Copyright 2026 The e2v Authors
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

#pragma once

#include "e2v/sim/image.hpp"

namespace e2v {

/// Reconstructed intensity image in [0,1] with its timestamp (s).
struct Frame {
  double timestamp = 0.0;
  Image image;

  friend bool operator==(const Frame&, const Frame&) = default;
};

}  // namespace e2v
