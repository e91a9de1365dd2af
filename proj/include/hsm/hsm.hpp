#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The hsm authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "hsm/auction.hpp"
#include "hsm/contribution.hpp"
#include "hsm/distribution.hpp"
#include "hsm/dynamic.hpp"
#include "hsm/experiment.hpp"
#include "hsm/market.hpp"
#include "hsm/mechanism.hpp"
#include "hsm/oracle.hpp"
#include "hsm/rng.hpp"
#include "hsm/valuation.hpp"
