// Copyright 2026 The AGNO Authors
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

#include "agno/allocation.hpp"
#include "agno/components.hpp"
#include "agno/config_io.hpp"
#include "agno/control.hpp"
#include "agno/csv.hpp"
#include "agno/dynamics.hpp"
#include "agno/ekf.hpp"
#include "agno/errors.hpp"
#include "agno/metrics.hpp"
#include "agno/observer.hpp"
#include "agno/rng.hpp"
#include "agno/scenario.hpp"
#include "agno/sim.hpp"
#include "agno/stability.hpp"
#include "agno/types.hpp"
