"""Shared test utilities."""


def scenario_payload(r, request_id=None) -> dict:
    """ScenarioRequest JSON body built from a flight record's inputs."""
    return {
        "origin": r.origin,
        "destination": r.destination,
        "flight_hour": r.flight_hour,
        "wind_dir_deg": r.wind_dir_deg,
        "wind_speed_kt": r.wind_speed_kt,
        "visibility_m": r.visibility_m,
        "temperature_c": r.temperature_c,
        "cloud_cover_octas": r.cloud_cover_octas,
        "fc_wind_dir_deg": r.fc_wind_dir_deg,
        "fc_wind_speed_kt": r.fc_wind_speed_kt,
        "fc_visibility_m": r.fc_visibility_m,
        "fc_temperature_c": r.fc_temperature_c,
        "runway_head_change": r.runway_head_change,
        "runway_config_change": r.runway_config_change,
        "request_id": request_id,
    }
