// Copyright 2026 The qaef Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header.

#pragma once

#include "qaef/acquire.hpp"
#include "qaef/bounds.hpp"
#include "qaef/grover.hpp"
#include "qaef/harness.hpp"
#include "qaef/io.hpp"
#include "qaef/noise.hpp"
#include "qaef/noise_study.hpp"
#include "qaef/observable.hpp"
#include "qaef/random.hpp"
#include "qaef/spectrum.hpp"
#include "qaef/statevec.hpp"
#include "qaef/validation.hpp"
