// Copyright 2026 The fqlattice Authors
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

#pragma once

#include "rational.hpp"
#include "ff_poly.hpp"
#include "laurent_plane.hpp"
#include "cf_engine.hpp"
#include "mat2.hpp"
#include "haar_model.hpp"
#include "parallel.hpp"
#include "lattice_enum.hpp"
#include "harness.hpp"
#include "report_io.hpp"
