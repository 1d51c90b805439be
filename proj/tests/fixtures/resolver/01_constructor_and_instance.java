package fixtures.basic;

import com.google.gson.Gson;

public class Basic {
    public String run(Object value) {
        Gson gson = new Gson(); //@use com.google.gson.Gson.<init>/0
        return gson.toJson(value); //@use com.google.gson.Gson.toJson/1
    }
}
