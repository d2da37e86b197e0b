// Copyright 2026 The PackBench Authors.
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


#ifndef PACKBENCH_HPP
#define PACKBENCH_HPP

#include "packbench/datasets.hpp"
#include "packbench/env.hpp"
#include "packbench/errors.hpp"
#include "packbench/experiment.hpp"
#include "packbench/geometry.hpp"
#include "packbench/grid.hpp"
#include "packbench/hull.hpp"
#include "packbench/map_io.hpp"
#include "packbench/oracle.hpp"
#include "packbench/policies.hpp"
#include "packbench/protocol.hpp"
#include "packbench/random.hpp"
#include "packbench/simplex.hpp"
#include "packbench/stability.hpp"

#endif  // PACKBENCH_HPP
