#pragma once

#include "ppqnd/extended.hpp"
#include "ppqnd/fock_core.hpp"
#include "ppqnd/polarization.hpp"
#include "ppqnd/qnd_sim.hpp"
#include "ppqnd/schemes.hpp"
#include "ppqnd/secular.hpp"
