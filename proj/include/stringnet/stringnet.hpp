#pragma once

#include "stringnet/assignment.hpp"
#include "stringnet/attacker.hpp"
#include "stringnet/core.hpp"
#include "stringnet/dominance.hpp"
#include "stringnet/dynamics.hpp"
#include "stringnet/formation.hpp"
#include "stringnet/mesh.hpp"
#include "stringnet/scenario.hpp"
#include "stringnet/simulate.hpp"
#include "stringnet/spherical.hpp"
#include "stringnet/thomson.hpp"
#include "stringnet/tracking.hpp"
#include "stringnet/transforms.hpp"
#include "stringnet/virtual_body.hpp"
