# %%
import pandas as pd
# %%
records = {'city': ['Oslo', 'Lima', 'Pune'], 'temp': ['3', '19', '31'], 'when': ['2021-01-01', '2021-06-01', '2021-09-01']}
cities = pd.DataFrame(records)  # op: read
# %%
cities['temp'] = cities['temp'].astype(int)  # op: as_type
cities['when'] = pd.to_datetime(cities['when'])  # op: datetime
cities = cities.rename(columns={'when': 'date'})  # op: rename
cities.set_index('city')
