/*
 * Copyright (C) 2026 The vsir Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "vsir/atlas.hpp"
#include "vsir/curves.hpp"
#include "vsir/dynamics.hpp"
#include "vsir/equilibria.hpp"
#include "vsir/error.hpp"
#include "vsir/heteroclinic.hpp"
#include "vsir/io.hpp"
#include "vsir/linalg.hpp"
#include "vsir/model.hpp"
#include "vsir/ode.hpp"
#include "vsir/parallel.hpp"
#include "vsir/periodic_orbit.hpp"
#include "vsir/portraits.hpp"
#include "vsir/power_fit.hpp"
#include "vsir/recovered.hpp"
#include "vsir/svg.hpp"
