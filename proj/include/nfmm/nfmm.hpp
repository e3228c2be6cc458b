// SPDX-License-Identifier: Apache-2.0
//
// nfmm - localization error bounds under near-field / wideband channel model mismatch
// Copyright (C) 2026 the nfmm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "nfmm/bounds.hpp"
#include "nfmm/channel.hpp"
#include "nfmm/contour.hpp"
#include "nfmm/derivatives.hpp"
#include "nfmm/estimators.hpp"
#include "nfmm/experiments.hpp"
#include "nfmm/io.hpp"
#include "nfmm/mcrb.hpp"
#include "nfmm/observation.hpp"
#include "nfmm/parallel.hpp"
#include "nfmm/params.hpp"
#include "nfmm/scenario.hpp"
